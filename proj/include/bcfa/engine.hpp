#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bcfa/cfg.hpp"
#include "bcfa/dsl/interp.hpp"
#include "bcfa/plan.hpp"

namespace bcfa {

struct RunMetrics {
    std::uint64_t visits = 0;
    std::uint64_t passes = 0;
    std::uint64_t checks = 0;
    std::uint64_t pushes = 0; // worklist re-insertions after seeding
    std::chrono::nanoseconds wall{0};

    RunMetrics& operator+=(const RunMetrics& o);
    /// Counters only; wall time never takes part in comparisons.
    friend bool operator==(const RunMetrics& a, const RunMetrics& b) {
        return a.visits == b.visits && a.passes == b.passes && a.checks == b.checks && a.pushes == b.pushes;
    }
};

struct EngineOptions {
    /// Pass ceiling; 0 means 10 * N. Worklist runs abort after max_passes * N visits.
    std::size_t max_passes = 0;

    std::size_t ceiling(std::size_t n) const { return max_passes ? max_passes : 10 * n; }
    friend bool operator==(const EngineOptions&, const EngineOptions&) = default;
};

/// Reads BCFA_MAX_PASSES when set to a positive integer.
EngineOptions options_from_env();

/// Fixed visiting order of an ordering-based strategy.
Ordering make_ordering(const Cfg& g, Strategy s);

/// Repeated sweeps in the plan's order until a sweep changes nothing (or one sweep
/// with single_pass). ITERATIVE traversals always get exactly one ascending sweep.
RunMetrics run_passes(dsl::Session& s, const dsl::TraversalDecl& t, const ExecutionPlan& plan,
                      const dsl::FixpointDecl* fp, const EngineOptions& opts = {});

/// Change-driven worklist seeded with PO (WPO) or RPO (WRPO).
RunMetrics run_worklist(dsl::Session& s, const dsl::TraversalDecl& t, Strategy strategy, dsl::Direction dir,
                        const dsl::FixpointDecl* fp, const EngineOptions& opts = {});

/// Dispatches to run_passes or run_worklist.
RunMetrics run_traversal(dsl::Session& s, const dsl::TraversalDecl& t, const ExecutionPlan& plan,
                         const dsl::FixpointDecl* fp, const EngineOptions& opts = {});

struct ExecutionResult {
    std::map<std::string, dsl::OutputMap> outputs; // by traversal name
    std::map<std::string, dsl::Value> globals;
    std::vector<RunMetrics> per_invocation;
    RunMetrics total;
};

/// Runs every traverse statement in program order, `plans[i]` for invocation i.
ExecutionResult execute_analysis(const dsl::DslProgram& p, const Cfg& g, const std::vector<ExecutionPlan>& plans,
                                 const EngineOptions& opts = {});

} // namespace bcfa
