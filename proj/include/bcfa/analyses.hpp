#pragma once

#include <map>
#include <string>
#include <vector>

#include "bcfa/cfg.hpp"
#include "bcfa/dsl/ast.hpp"
#include "bcfa/dsl/interp.hpp"
#include "bcfa/props.hpp"

namespace bcfa {

struct AnalysisAsset {
    std::string name;   // PDOM, DOM, RD, LV, AE, VBE, UDV, COL
    std::string source; // DSL text
    std::vector<AnalysisProperties> expected;
    dsl::DslProgram program; // parsed once at load
};

/// The shipped corpus, parsed and checked against its expected properties on first use.
const std::vector<AnalysisAsset>& load_corpus();

/// nullptr when no asset has that code.
const AnalysisAsset* find_asset(std::string_view name);

/// Outputs of every traversal of the asset, computed without the DSL engine.
std::map<std::string, dsl::OutputMap> reference_solution(const AnalysisAsset& asset, const Cfg& g);

} // namespace bcfa
