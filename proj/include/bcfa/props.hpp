#pragma once

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "bcfa/dsl/ast.hpp"

namespace bcfa {

using dsl::Direction;

/// Names that must-alias the traversal's node binder.
struct AliasEnv {
    std::set<std::string> names;
    bool contains(const std::string& n) const { return names.count(n) > 0; }
};

/// Output variables of `v = output(n', t)` assignments: v (n' aliases n) and vp (it does not).
struct OutputVarSets {
    std::set<std::string> v;
    std::set<std::string> vp;
};

struct AnalysisProperties {
    bool data_flow_sensitive = false;
    bool loop_sensitive = false;
    Direction direction = Direction::Forward;

    friend bool operator==(const AnalysisProperties&, const AnalysisProperties&) = default;
};

struct TraversalProperties {
    std::string traversal;
    AnalysisProperties props;

    friend bool operator==(const TraversalProperties&, const TraversalProperties&) = default;
};

struct PropsReport {
    std::vector<TraversalProperties> entries; // one per traverse statement, program order
    std::chrono::nanoseconds static_time{0};

    friend bool operator==(const PropsReport& a, const PropsReport& b) { return a.entries == b.entries; }
};

// Every function below expects a traversal already in three-address form.
AliasEnv compute_aliases(const dsl::TraversalDecl& t);
bool detect_data_flow_sensitivity(const dsl::TraversalDecl& t, const AliasEnv& aliases);
OutputVarSets output_variables(const dsl::TraversalDecl& t, const AliasEnv& aliases);
bool detect_loop_sensitivity(const dsl::TraversalDecl& t, const AliasEnv& aliases);

/// Normalizes each traversal once and computes its properties; times the whole extraction.
PropsReport extract_properties(const dsl::DslProgram& p);

} // namespace bcfa
