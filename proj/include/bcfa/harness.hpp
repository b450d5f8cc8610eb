#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcfa/analyses.hpp"
#include "bcfa/cfg.hpp"
#include "bcfa/engine.hpp"
#include "bcfa/selector.hpp"

namespace bcfa {

enum class Metric { Visits, Time };

std::string_view to_string(Metric m);
std::optional<Metric> metric_from_string(std::string_view s);

/// Strategy names accepted by the bench: the fixed strategies plus HYBRID.
inline constexpr const char* kHybrid = "HYBRID";

struct BenchConfig {
    std::uint64_t seed = 1;
    std::size_t graphs = 1000;
    std::size_t min_size = 4;
    std::size_t max_size = 40;
    /// Relative weights of Sequential, BranchOnly, LoopNoBranch, LoopWithBranch.
    std::array<double, 4> class_mix{65, 25, 5, 5};
    std::vector<std::string> analyses{"PDOM", "DOM", "RD", "LV", "AE", "VBE", "UDV", "COL"};
    std::vector<std::string> strategies{"DFS", "PO", "RPO", "WPO", "WRPO", "ANY", kHybrid};
    Metric metric = Metric::Visits;
    std::size_t threads = 1; // 0 = hardware concurrency
    EngineOptions engine;

    friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

/// Reads a JSON object whose keys mirror BenchConfig; missing keys keep their defaults.
BenchConfig bench_config_from_json(const std::string& text);

/// Seeded corpus following the class mix; graph i is reproducible from (seed, i).
std::vector<Cfg> generate_corpus(const BenchConfig& cfg);

/// The selector's plan for every traverse statement of an analysis on graph g.
std::vector<DecisionOutcome> hybrid_decisions(const PropsReport& props, const Cfg& g);
std::vector<ExecutionPlan> hybrid_plans(const PropsReport& props, const Cfg& g, bool optimize = true);

/// Fixed strategy for every traverse statement, always with fixpoint confirmation.
std::vector<ExecutionPlan> fixed_plans(const dsl::DslProgram& p, Strategy s);

struct CellTotals {
    std::string analysis;
    std::string strategy;
    std::uint64_t graphs = 0;
    std::uint64_t visits = 0;
    std::uint64_t passes = 0;
    std::uint64_t checks = 0;
    double time_us = 0;
    std::uint64_t infeasible = 0;

    friend bool operator==(const CellTotals&, const CellTotals&) = default;
};

/// R = (T_S - T_H) / T_S in percent, for one fixed strategy S against HYBRID.
struct Reduction {
    std::string analysis;
    std::string strategy;
    std::optional<double> visits_pct; // empty when the cell is infeasible
    std::optional<double> time_pct;

    friend bool operator==(const Reduction&, const Reduction&) = default;
};

struct Misprediction {
    std::string analysis;
    std::string graph;
    double hybrid = 0;
    std::string best_strategy;
    double best = 0;

    friend bool operator==(const Misprediction&, const Misprediction&) = default;
};

struct BenchReport {
    Metric metric = Metric::Visits;
    std::uint64_t seed = 0;
    std::uint64_t graphs = 0;
    std::vector<CellTotals> cells; // analysis order of the config, then strategy order
    std::vector<Reduction> reductions;
    std::map<std::string, double> precision; // only when HYBRID and a fixed strategy ran
    std::vector<Misprediction> mispredictions;
    double static_us = 0;   // property extraction, once per analysis
    double total_us = 0;    // static + selection + HYBRID execution (all cells without HYBRID)
    double overhead = 0;    // static_us / total_us

    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

BenchReport run_matrix(const BenchConfig& cfg);
BenchReport run_matrix(const BenchConfig& cfg, const std::vector<Cfg>& corpus);

/// Fraction of graphs per analysis where HYBRID is at least as good as every fixed strategy.
std::map<std::string, double> measure_selection_precision(const std::vector<std::string>& analyses,
                                                          const std::vector<Cfg>& corpus,
                                                          Metric metric = Metric::Visits);

struct OutputMismatch {
    std::string analysis;
    std::string graph;
    std::string traversal;
    NodeId node = 0;
    std::string against; // "oracle" or "reference"
    std::string expected;
    std::string actual;
};

struct GroundTruth {
    std::size_t runs = 0; // (analysis, graph) pairs checked
    std::vector<OutputMismatch> mismatches;
    bool passed() const { return mismatches.empty(); }
};

/// Compares HYBRID outputs with the worklist oracle and reference_solution. `force`
/// replaces the plan of every non-ITERATIVE traversal (negative controls).
GroundTruth validate_groundtruth(const std::vector<std::string>& analyses, const std::vector<Cfg>& corpus,
                                 std::optional<ExecutionPlan> force = std::nullopt, std::size_t threads = 1);

enum class ReportFormat { Text, Csv, Json };
std::optional<ReportFormat> report_format_from_string(std::string_view s);

std::string emit_report(const BenchReport& r, ReportFormat f);
BenchReport report_from_json(const std::string& text);

} // namespace bcfa
