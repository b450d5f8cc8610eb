#include "bcfa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace bcfa {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(Metric m) { return m == Metric::Visits ? "visits" : "time"; }

std::optional<Metric> metric_from_string(std::string_view s) {
    if (s == "visits") return Metric::Visits;
    if (s == "time") return Metric::Time;
    return std::nullopt;
}

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
    if (s == "text") return ReportFormat::Text;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    return std::nullopt;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

double micros(std::chrono::nanoseconds ns) { return static_cast<double>(ns.count()) / 1000.0; }

double round1(double x) { return std::round(x * 10.0) / 10.0; }

const AnalysisAsset& asset_or_throw(const std::string& name) {
    const AnalysisAsset* a = find_asset(name);
    if (!a) throw Error("unknown analysis '" + name + "'");
    return *a;
}

struct Cell {
    RunMetrics m;
    bool infeasible = false;
};

} // namespace

BenchConfig bench_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("bench config: ") + e.what());
    }
    if (!j.is_object()) throw Error("bench config must be a JSON object");
    BenchConfig c;
    try {
        for (auto& [key, v] : j.items()) {
            if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "graphs") c.graphs = v.get<std::size_t>();
            else if (key == "min_size") c.min_size = v.get<std::size_t>();
            else if (key == "max_size") c.max_size = v.get<std::size_t>();
            else if (key == "class_mix") c.class_mix = v.get<std::array<double, 4>>();
            else if (key == "analyses") c.analyses = v.get<std::vector<std::string>>();
            else if (key == "strategies") c.strategies = v.get<std::vector<std::string>>();
            else if (key == "threads") c.threads = v.get<std::size_t>();
            else if (key == "max_passes") c.engine.max_passes = v.get<std::size_t>();
            else if (key == "metric") {
                auto m = metric_from_string(v.get<std::string>());
                if (!m) throw Error("bench config: metric must be visits or time");
                c.metric = *m;
            } else {
                throw Error("bench config: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw Error(std::string("bench config: ") + e.what());
    }
    return c;
}

std::vector<Cfg> generate_corpus(const BenchConfig& cfg) {
    if (cfg.min_size > cfg.max_size) throw Error("min_size exceeds max_size");
    double weight = 0;
    for (double w : cfg.class_mix) {
        if (w < 0) throw Error("class mix weights must be non-negative");
        weight += w;
    }
    if (weight <= 0) throw Error("class mix is empty");
    const Cyclicity classes[] = {Cyclicity::Sequential, Cyclicity::BranchOnly, Cyclicity::LoopNoBranch,
                                 Cyclicity::LoopWithBranch};
    std::mt19937_64 rng(cfg.seed);
    std::vector<Cfg> out;
    out.reserve(cfg.graphs);
    for (std::size_t i = 0; i < cfg.graphs; ++i) {
        double pick = std::uniform_real_distribution<double>(0, weight)(rng);
        std::size_t k = 0;
        while (k < 3 && (pick -= cfg.class_mix[k]) >= 0) ++k;
        while (cfg.class_mix[k] == 0) k = (k + 3) % 4; // numeric edge on the last bucket
        Cyclicity c = classes[k];
        std::size_t lo = std::max(cfg.min_size, min_size(c));
        std::size_t hi = std::max(cfg.max_size, lo);
        std::size_t n = lo + rng() % (hi - lo + 1);
        out.push_back(generate_random_cfg(rng(), n, c));
    }
    return out;
}

std::vector<DecisionOutcome> hybrid_decisions(const PropsReport& props, const Cfg& g) {
    std::vector<DecisionOutcome> out;
    out.reserve(props.entries.size());
    for (const auto& e : props.entries) out.push_back(select(e.props, g.cyclicity()));
    return out;
}

std::vector<ExecutionPlan> hybrid_plans(const PropsReport& props, const Cfg& g, bool optimize) {
    std::vector<ExecutionPlan> plans;
    for (const auto& d : hybrid_decisions(props, g)) {
        ExecutionPlan p = d.plan;
        if (!optimize) p.single_pass = false;
        plans.push_back(p);
    }
    return plans;
}

std::vector<ExecutionPlan> fixed_plans(const dsl::DslProgram& p, Strategy s) {
    std::vector<ExecutionPlan> plans;
    for (const auto& inv : p.invocations) plans.push_back({s, false, inv.direction});
    return plans;
}

BenchReport run_matrix(const BenchConfig& cfg) { return run_matrix(cfg, generate_corpus(cfg)); }

BenchReport run_matrix(const BenchConfig& cfg, const std::vector<Cfg>& corpus) {
    BenchReport r;
    r.metric = cfg.metric;
    r.seed = cfg.seed;
    r.graphs = corpus.size();
    if (cfg.strategies.empty() || cfg.analyses.empty()) return r;

    std::vector<const AnalysisAsset*> assets;
    std::vector<PropsReport> props;
    for (const auto& name : cfg.analyses) {
        assets.push_back(&asset_or_throw(name));
        props.push_back(extract_properties(assets.back()->program));
        r.static_us += micros(props.back().static_time);
    }
    // -1 marks HYBRID
    std::vector<int> strategies;
    for (const auto& s : cfg.strategies) {
        if (s == kHybrid) strategies.push_back(-1);
        else if (auto parsed = strategy_from_string(s)) strategies.push_back(static_cast<int>(*parsed));
        else throw Error("unknown strategy '" + s + "'");
    }

    const std::size_t na = assets.size(), ns = strategies.size();
    std::vector<Cell> cells(corpus.size() * na * ns);
    auto at = [&](std::size_t gi, std::size_t ai, std::size_t si) -> Cell& { return cells[(gi * na + ai) * ns + si]; };

    parallel_for(corpus.size(), cfg.threads, [&](std::size_t gi) {
        const Cfg& g = corpus[gi];
        for (std::size_t ai = 0; ai < na; ++ai) {
            for (std::size_t si = 0; si < ns; ++si) {
                Cell& cell = at(gi, ai, si);
                auto start = Clock::now();
                try {
                    std::vector<ExecutionPlan> plans =
                        strategies[si] < 0 ? hybrid_plans(props[ai], g)
                                           : fixed_plans(assets[ai]->program, static_cast<Strategy>(strategies[si]));
                    cell.m = execute_analysis(assets[ai]->program, g, plans, cfg.engine).total;
                } catch (const DivergenceError&) {
                    cell.infeasible = true;
                }
                cell.m.wall = Clock::now() - start;
            }
        }
    });

    const auto hybrid_it = std::find(strategies.begin(), strategies.end(), -1);
    const bool has_hybrid = hybrid_it != strategies.end();
    const std::size_t hi = static_cast<std::size_t>(hybrid_it - strategies.begin());
    const bool has_fixed = ns > (has_hybrid ? 1u : 0u);
    auto value = [&](const Cell& c) {
        return cfg.metric == Metric::Visits ? static_cast<double>(c.m.visits) : micros(c.m.wall);
    };

    for (std::size_t ai = 0; ai < na; ++ai) {
        std::vector<CellTotals> totals(ns);
        for (std::size_t si = 0; si < ns; ++si) {
            CellTotals& t = totals[si];
            t.analysis = assets[ai]->name;
            t.strategy = cfg.strategies[si];
            for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
                const Cell& c = at(gi, ai, si);
                ++t.graphs;
                t.time_us += micros(c.m.wall);
                if (c.infeasible) {
                    ++t.infeasible;
                    continue;
                }
                t.visits += c.m.visits;
                t.passes += c.m.passes;
                t.checks += c.m.checks;
            }
            r.cells.push_back(t);
            if (has_hybrid && si == hi) r.total_us += t.time_us;
            if (!has_hybrid) r.total_us += t.time_us;
        }
        if (!has_hybrid) continue;

        const CellTotals& h = totals[hi];
        for (std::size_t si = 0; si < ns; ++si) {
            if (si == hi) continue;
            const CellTotals& s = totals[si];
            Reduction red{assets[ai]->name, cfg.strategies[si], std::nullopt, std::nullopt};
            if (s.infeasible == 0 && h.infeasible == 0) {
                if (s.visits > 0)
                    red.visits_pct = round1(100.0 * (static_cast<double>(s.visits) - static_cast<double>(h.visits)) /
                                            static_cast<double>(s.visits));
                if (s.time_us > 0) red.time_pct = round1(100.0 * (s.time_us - h.time_us) / s.time_us);
            }
            r.reductions.push_back(red);
        }

        if (!has_fixed) continue;
        std::size_t correct = 0;
        for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
            const Cell& hc = at(gi, ai, hi);
            double best = 0;
            std::size_t best_si = ns;
            for (std::size_t si = 0; si < ns; ++si) {
                if (si == hi || at(gi, ai, si).infeasible) continue;
                double v = value(at(gi, ai, si));
                if (best_si == ns || v < best) {
                    best = v;
                    best_si = si;
                }
            }
            if (!hc.infeasible && (best_si == ns || value(hc) <= best)) {
                ++correct;
            } else {
                r.mispredictions.push_back({assets[ai]->name, corpus[gi].name(), hc.infeasible ? -1 : value(hc),
                                            best_si == ns ? "" : cfg.strategies[best_si], best});
            }
        }
        r.precision[assets[ai]->name] =
            corpus.empty() ? 1.0 : static_cast<double>(correct) / static_cast<double>(corpus.size());
    }
    r.total_us += r.static_us;
    r.overhead = r.total_us > 0 ? r.static_us / r.total_us : 0;
    return r;
}

std::map<std::string, double> measure_selection_precision(const std::vector<std::string>& analyses,
                                                          const std::vector<Cfg>& corpus, Metric metric) {
    BenchConfig cfg;
    cfg.analyses = analyses;
    cfg.metric = metric;
    return run_matrix(cfg, corpus).precision;
}

GroundTruth validate_groundtruth(const std::vector<std::string>& analyses, const std::vector<Cfg>& corpus,
                                 std::optional<ExecutionPlan> force, std::size_t threads) {
    std::vector<const AnalysisAsset*> assets;
    std::vector<PropsReport> props;
    for (const auto& name : analyses) {
        assets.push_back(&asset_or_throw(name));
        props.push_back(extract_properties(assets.back()->program));
    }
    std::vector<std::vector<OutputMismatch>> per_graph(corpus.size());

    parallel_for(corpus.size(), threads, [&](std::size_t gi) {
        const Cfg& g = corpus[gi];
        auto& found = per_graph[gi];
        for (std::size_t ai = 0; ai < assets.size(); ++ai) {
            const AnalysisAsset& a = *assets[ai];
            auto fail = [&](const std::string& against, const std::string& what) {
                found.push_back({a.name, g.name(), "", 0, against, "", what});
            };
            std::vector<ExecutionPlan> plans;
            try {
                plans = hybrid_plans(props[ai], g);
            } catch (const Error& e) {
                fail("selector", e.what());
                continue;
            }
            std::vector<ExecutionPlan> oracle;
            for (std::size_t i = 0; i < a.program.invocations.size(); ++i) {
                Direction d = a.program.invocations[i].direction;
                if (force && d != Direction::Iterative) plans[i] = *force;
                oracle.push_back({d == Direction::Forward    ? Strategy::Wrpo
                                  : d == Direction::Backward ? Strategy::Wpo
                                                             : Strategy::Any,
                                  false, d});
            }
            std::map<std::string, dsl::OutputMap> got, want_oracle;
            try {
                got = execute_analysis(a.program, g, plans).outputs;
            } catch (const Error& e) {
                fail("hybrid", e.what());
                continue;
            }
            want_oracle = execute_analysis(a.program, g, oracle).outputs;
            auto compare = [&](const std::map<std::string, dsl::OutputMap>& want, const char* against) {
                for (const auto& [t, expected] : want) {
                    const dsl::OutputMap& actual = got.at(t);
                    for (NodeId v = 0; v < expected.size(); ++v) {
                        if (actual.at(v) != expected[v]) {
                            found.push_back({a.name, g.name(), t, v, against, dsl::to_display(expected[v]),
                                             dsl::to_display(actual.at(v))});
                        }
                    }
                }
            };
            compare(want_oracle, "oracle");
            compare(reference_solution(a, g), "reference");
        }
    });

    GroundTruth gt;
    gt.runs = corpus.size() * assets.size();
    for (auto& v : per_graph)
        for (auto& m : v) gt.mismatches.push_back(std::move(m));
    return gt;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string fixed1(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << v;
    return os.str();
}

std::string pct(const std::optional<double>& v) { return v ? fixed1(*v) + "%" : "--"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json to_json(const BenchReport& r) {
    json j;
    j["metric"] = std::string(to_string(r.metric));
    j["seed"] = r.seed;
    j["graphs"] = r.graphs;
    j["cells"] = json::array();
    for (const auto& c : r.cells) {
        j["cells"].push_back({{"analysis", c.analysis},
                              {"strategy", c.strategy},
                              {"graphs", c.graphs},
                              {"total_visits", c.visits},
                              {"total_passes", c.passes},
                              {"total_checks", c.checks},
                              {"total_time_us", c.time_us},
                              {"infeasible_count", c.infeasible}});
    }
    j["reductions"] = json::array();
    for (const auto& red : r.reductions) {
        j["reductions"].push_back({{"analysis", red.analysis},
                                   {"strategy", red.strategy},
                                   {"visits_pct", opt_json(red.visits_pct)},
                                   {"time_pct", opt_json(red.time_pct)}});
    }
    j["precision"] = json::object();
    for (const auto& [name, p] : r.precision) j["precision"][name] = p;
    j["mispredictions"] = json::array();
    for (const auto& m : r.mispredictions) {
        j["mispredictions"].push_back({{"analysis", m.analysis},
                                       {"graph", m.graph},
                                       {"hybrid", m.hybrid},
                                       {"best_strategy", m.best_strategy},
                                       {"best", m.best}});
    }
    j["static_us"] = r.static_us;
    j["total_us"] = r.total_us;
    j["overhead_ratio"] = r.overhead;
    return j;
}

} // namespace

std::string emit_report(const BenchReport& r, ReportFormat f) {
    if (f == ReportFormat::Json) return to_json(r).dump(2) + "\n";

    std::ostringstream os;
    auto metric = [](const CellTotals& c, std::uint64_t v) {
        return c.infeasible ? std::string("--") : std::to_string(v);
    };
    auto time = [](const CellTotals& c) { return c.infeasible ? std::string("--") : fixed1(c.time_us); };

    if (f == ReportFormat::Csv) {
        os << "analysis,strategy,graphs,total_visits,total_passes,total_checks,total_time_us,infeasible_count\n";
        for (const auto& c : r.cells) {
            os << c.analysis << ',' << c.strategy << ',' << c.graphs << ',' << metric(c, c.visits) << ','
               << metric(c, c.passes) << ',' << metric(c, c.checks) << ',' << time(c) << ',' << c.infeasible
               << '\n';
        }
        if (!r.reductions.empty()) {
            os << "\nanalysis,strategy,reduction_visits_pct,reduction_time_pct\n";
            for (const auto& red : r.reductions) {
                os << red.analysis << ',' << red.strategy << ','
                   << (red.visits_pct ? fixed1(*red.visits_pct) : "--") << ','
                   << (red.time_pct ? fixed1(*red.time_pct) : "--") << '\n';
            }
        }
        return os.str();
    }

    os << "bench metric=" << to_string(r.metric) << " seed=" << r.seed << " graphs=" << r.graphs << "\n\n";
    os << std::left << std::setw(9) << "analysis" << std::setw(9) << "strategy" << std::right << std::setw(8)
       << "graphs" << std::setw(12) << "visits" << std::setw(10) << "passes" << std::setw(10) << "checks"
       << std::setw(14) << "time_us" << std::setw(11) << "infeasible" << '\n';
    for (const auto& c : r.cells) {
        os << std::left << std::setw(9) << c.analysis << std::setw(9) << c.strategy << std::right << std::setw(8)
           << c.graphs << std::setw(12) << metric(c, c.visits) << std::setw(10) << metric(c, c.passes)
           << std::setw(10) << metric(c, c.checks) << std::setw(14) << time(c) << std::setw(11) << c.infeasible
           << '\n';
    }
    if (!r.reductions.empty()) {
        os << "\nreduction R = (T_S - T_H) / T_S of HYBRID against S\n";
        os << std::left << std::setw(9) << "analysis" << std::setw(9) << "S" << std::right << std::setw(9)
           << "visits" << std::setw(9) << "time" << '\n';
        for (const auto& red : r.reductions) {
            os << std::left << std::setw(9) << red.analysis << std::setw(9) << red.strategy << std::right
               << std::setw(9) << pct(red.visits_pct) << std::setw(9) << pct(red.time_pct) << '\n';
        }
    }
    if (!r.precision.empty()) {
        os << "\nselection precision (" << to_string(r.metric) << ")\n";
        for (const auto& [name, p] : r.precision) os << "  " << std::left << std::setw(6) << name << fixed1(100 * p) << "%\n";
        os << "mispredictions " << r.mispredictions.size() << '\n';
        for (const auto& m : r.mispredictions) {
            os << "  " << m.analysis << ' ' << m.graph << " hybrid=" << m.hybrid << " best=" << m.best_strategy
               << ':' << m.best << '\n';
        }
    }
    os << "\nstatic_us=" << fixed1(r.static_us) << " total_us=" << fixed1(r.total_us)
       << " overhead=" << std::setprecision(3) << std::fixed << 100 * r.overhead << "%\n";
    return os.str();
}

BenchReport report_from_json(const std::string& text) {
    BenchReport r;
    try {
        json j = json::parse(text);
        auto m = metric_from_string(j.at("metric").get<std::string>());
        if (!m) throw Error("report: bad metric");
        r.metric = *m;
        r.seed = j.at("seed").get<std::uint64_t>();
        r.graphs = j.at("graphs").get<std::uint64_t>();
        for (const auto& c : j.at("cells")) {
            r.cells.push_back({c.at("analysis").get<std::string>(), c.at("strategy").get<std::string>(),
                               c.at("graphs").get<std::uint64_t>(), c.at("total_visits").get<std::uint64_t>(),
                               c.at("total_passes").get<std::uint64_t>(), c.at("total_checks").get<std::uint64_t>(),
                               c.at("total_time_us").get<double>(), c.at("infeasible_count").get<std::uint64_t>()});
        }
        for (const auto& red : j.at("reductions")) {
            r.reductions.push_back({red.at("analysis").get<std::string>(), red.at("strategy").get<std::string>(),
                                    opt_from(red.at("visits_pct")), opt_from(red.at("time_pct"))});
        }
        for (const auto& [name, p] : j.at("precision").items()) r.precision[name] = p.get<double>();
        for (const auto& m : j.at("mispredictions")) {
            r.mispredictions.push_back({m.at("analysis").get<std::string>(), m.at("graph").get<std::string>(),
                                        m.at("hybrid").get<double>(), m.at("best_strategy").get<std::string>(),
                                        m.at("best").get<double>()});
        }
        r.static_us = j.at("static_us").get<double>();
        r.total_us = j.at("total_us").get<double>();
        r.overhead = j.at("overhead_ratio").get<double>();
    } catch (const json::exception& e) {
        throw Error(std::string("report: ") + e.what());
    }
    return r;
}

} // namespace bcfa
