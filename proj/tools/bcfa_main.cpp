// bcfa: select and run traversal strategies for CFG analyses written in the DSL.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcfa/harness.hpp"

using namespace bcfa;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// Exit codes.
constexpr int kOk = 0, kUserError = 1, kInternalError = 2, kValidationFailed = 3;

struct UserError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UserError("cannot write '" + path + "'");
}

// A shipped analysis code or the path of a DSL file.
struct LoadedAnalysis {
    std::string name;
    dsl::DslProgram program;
};

LoadedAnalysis load_analysis(const std::string& spec) {
    if (const AnalysisAsset* a = find_asset(spec)) return {a->name, a->program};
    if (!fs::exists(spec)) throw UserError("'" + spec + "' is neither a shipped analysis nor a file");
    try {
        return {fs::path(spec).stem().string(), dsl::parse_program(read_file(spec))};
    } catch (const ParseError& e) {
        throw UserError(spec + ":" + e.what());
    } catch (const DslError& e) {
        throw UserError(spec + ":" + e.what());
    }
}

Cfg load_graph(const std::string& path) {
    if (!fs::exists(path)) throw UserError("graph file '" + path + "' does not exist");
    try {
        return parse_cfg(read_file(path));
    } catch (const ParseError& e) {
        throw UserError(path + ":" + e.what());
    } catch (const CfgError& e) {
        throw UserError(path + ": " + e.what());
    }
}

ReportFormat format_of(const std::string& s) {
    auto f = report_format_from_string(s);
    if (!f) throw UserError("unknown format '" + s + "' (text, csv or json)");
    return *f;
}

json to_json(const dsl::Value& v) {
    using K = dsl::Value::Kind;
    switch (v.kind()) {
    case K::Null: return nullptr;
    case K::Int: return v.as_int();
    case K::Bool: return v.as_bool();
    case K::Str: return v.as_string();
    case K::Node: return v.as_node();
    case K::Set:
    case K::Seq: {
        json arr = json::array();
        for (const auto& x : v.items()) arr.push_back(to_json(x));
        return arr;
    }
    }
    return nullptr;
}

std::string bit(bool b) { return b ? "1" : "0"; }

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string analysis, graph, strategy, format = "text";
    bool no_optimize = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
    ReportFormat fmt = format_of(a.format);
    LoadedAnalysis la = load_analysis(a.analysis);
    Cfg g = load_graph(a.graph);
    EngineOptions opts = options_from_env();
    PropsReport props = extract_properties(la.program);

    std::vector<ExecutionPlan> plans;
    std::vector<int> paths;
    if (!a.strategy.empty()) {
        auto s = strategy_from_string(a.strategy);
        if (!s) throw UserError("unknown strategy '" + a.strategy + "'");
        plans = fixed_plans(la.program, *s);
        paths.assign(plans.size(), 0);
    } else {
        for (const auto& d : hybrid_decisions(props, g)) {
            plans.push_back(d.plan);
            if (a.no_optimize) plans.back().single_pass = false;
            paths.push_back(d.path);
        }
    }
    ExecutionResult r = execute_analysis(la.program, g, plans, opts);
    const auto& invs = la.program.invocations;
    auto path_text = [&](std::size_t i) { return paths[i] ? "P" + std::to_string(paths[i]) : std::string("-"); };
    auto us = [](const RunMetrics& m) { return std::chrono::duration<double, std::micro>(m.wall).count(); };

    if (fmt == ReportFormat::Json) {
        json j;
        j["analysis"] = la.name;
        j["graph"] = g.name();
        j["nodes"] = g.size();
        j["cyclicity"] = std::string(to_string(g.cyclicity()));
        j["plans"] = json::array();
        for (std::size_t i = 0; i < invs.size(); ++i) {
            const RunMetrics& m = r.per_invocation[i];
            j["plans"].push_back({{"traversal", invs[i].traversal},
                                  {"direction", std::string(dsl::short_name(invs[i].direction))},
                                  {"path", path_text(i)},
                                  {"strategy", std::string(to_string(plans[i].strategy))},
                                  {"single_pass", plans[i].single_pass},
                                  {"visits", m.visits},
                                  {"passes", m.passes},
                                  {"checks", m.checks},
                                  {"pushes", m.pushes},
                                  {"time_us", us(m)}});
        }
        j["total"] = {{"visits", r.total.visits},
                      {"passes", r.total.passes},
                      {"checks", r.total.checks},
                      {"pushes", r.total.pushes},
                      {"time_us", us(r.total)}};
        j["outputs"] = json::object();
        for (const auto& t : la.program.traversals) {
            json per = json::object();
            const auto& out = r.outputs.at(t.name);
            for (NodeId v = 0; v < out.size(); ++v) per[std::to_string(v)] = to_json(out[v]);
            j["outputs"][t.name] = per;
        }
        j["globals"] = json::object();
        for (const auto& gd : la.program.globals) j["globals"][gd.name] = to_json(r.globals.at(gd.name));
        std::cout << j.dump(2) << '\n';
        return kOk;
    }

    if (fmt == ReportFormat::Csv) {
        std::cout << "traversal,node,value\n";
        for (const auto& t : la.program.traversals) {
            const auto& out = r.outputs.at(t.name);
            for (NodeId v = 0; v < out.size(); ++v)
                std::cout << t.name << ',' << v << ',' << csv_quote(dsl::to_display(out[v])) << '\n';
        }
        return kOk;
    }

    std::cout << "analysis " << la.name << " graph " << g.name() << " nodes=" << g.size()
              << " cyclicity=" << to_string(g.cyclicity()) << '\n';
    for (std::size_t i = 0; i < invs.size(); ++i) {
        const RunMetrics& m = r.per_invocation[i];
        std::cout << "plan traversal=" << invs[i].traversal << " dir=" << dsl::short_name(invs[i].direction)
                  << " path=" << path_text(i) << " strategy=" << to_string(plans[i].strategy)
                  << " single_pass=" << bit(plans[i].single_pass) << " visits=" << m.visits
                  << " passes=" << m.passes << " checks=" << m.checks << " pushes=" << m.pushes << '\n';
    }
    std::cout << "total visits=" << r.total.visits << " passes=" << r.total.passes << " checks=" << r.total.checks
              << " pushes=" << r.total.pushes << " time_us=" << static_cast<long long>(us(r.total)) << '\n';
    for (const auto& t : la.program.traversals) {
        std::cout << "output " << t.name << '\n';
        const auto& out = r.outputs.at(t.name);
        for (NodeId v = 0; v < out.size(); ++v) std::cout << "  " << v << ' ' << dsl::to_display(out[v]) << '\n';
    }
    for (const auto& gd : la.program.globals)
        std::cout << "global " << gd.name << ' ' << dsl::to_display(r.globals.at(gd.name)) << '\n';
    return kOk;
}

int cmd_explain(const std::string& analysis, const std::string& graph) {
    LoadedAnalysis la = load_analysis(analysis);
    Cfg g = load_graph(graph);
    PropsReport props = extract_properties(la.program);
    for (const auto& e : props.entries) {
        DecisionOutcome d = select(e.props, g.cyclicity());
        std::cout << "traversal=" << e.traversal << " flw=" << bit(e.props.data_flow_sensitive)
                  << " lp=" << bit(e.props.loop_sensitive) << " dir=" << dsl::short_name(e.props.direction)
                  << " cyclicity=" << to_string(g.cyclicity()) << " path=P" << d.path
                  << " strategy=" << to_string(d.plan.strategy) << " single_pass=" << bit(d.plan.single_pass)
                  << '\n';
    }
    return kOk;
}

int cmd_props(const std::string& analysis) {
    LoadedAnalysis la = load_analysis(analysis);
    PropsReport props = extract_properties(la.program);
    auto us = std::chrono::duration_cast<std::chrono::microseconds>(props.static_time).count();
    for (const auto& e : props.entries) {
        std::cout << e.traversal << " flw=" << bit(e.props.data_flow_sensitive)
                  << " lp=" << bit(e.props.loop_sensitive) << " dir=" << dsl::short_name(e.props.direction)
                  << " static_us=" << us << '\n';
    }
    return kOk;
}

struct BenchArgs {
    std::string config, format = "text", out, metric;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> graphs, min_size, max_size, threads;
    std::vector<std::string> analyses, strategies;
    std::vector<double> mix;
};

int cmd_bench(const BenchArgs& a) {
    ReportFormat fmt = format_of(a.format);
    BenchConfig cfg = a.config.empty() ? BenchConfig{} : bench_config_from_json(read_file(a.config));
    if (a.seed) cfg.seed = *a.seed;
    if (a.graphs) cfg.graphs = *a.graphs;
    if (a.min_size) cfg.min_size = *a.min_size;
    if (a.max_size) cfg.max_size = *a.max_size;
    if (a.threads) cfg.threads = *a.threads;
    if (!a.analyses.empty()) cfg.analyses = a.analyses;
    if (!a.strategies.empty()) cfg.strategies = a.strategies;
    if (!a.metric.empty()) {
        auto m = metric_from_string(a.metric);
        if (!m) throw UserError("unknown metric '" + a.metric + "' (visits or time)");
        cfg.metric = *m;
    }
    if (!a.mix.empty()) {
        if (a.mix.size() != 4) throw UserError("--mix takes four weights");
        std::copy(a.mix.begin(), a.mix.end(), cfg.class_mix.begin());
    }
    if (std::getenv("BCFA_MAX_PASSES")) cfg.engine = options_from_env();
    for (const auto& name : cfg.analyses)
        if (!find_asset(name)) throw UserError("unknown analysis '" + name + "'");
    for (const auto& s : cfg.strategies)
        if (s != kHybrid && !strategy_from_string(s)) throw UserError("unknown strategy '" + s + "'");

    std::string text = emit_report(run_matrix(cfg), fmt);
    if (a.out.empty()) std::cout << text;
    else write_file(a.out, text);
    return kOk;
}

int cmd_gen(std::uint64_t seed, std::size_t count, const std::string& cls, std::size_t size, const std::string& dir) {
    auto c = cyclicity_from_string(cls);
    if (!c) throw UserError("unknown class '" + cls + "' (sequential, branch_only, loop_no_branch, loop_with_branch)");
    if (size < min_size(*c))
        throw UserError("class " + cls + " needs at least " + std::to_string(min_size(*c)) + " nodes");
    fs::create_directories(dir);
    for (std::size_t i = 0; i < count; ++i) {
        Cfg g = generate_random_cfg(seed + i, size, *c);
        std::string path = (fs::path(dir) / (g.name() + ".cfg")).string();
        write_file(path, write_cfg(g));
        std::cout << path << '\n';
    }
    return kOk;
}

struct ValidateArgs {
    std::string corpus, format = "text", out;
    std::uint64_t seed = 1;
    std::size_t graphs = 1000, threads = 1;
    std::vector<std::string> analyses;
};

int cmd_validate(const ValidateArgs& a) {
    ReportFormat fmt = format_of(a.format);
    std::vector<Cfg> corpus;
    if (!a.corpus.empty()) {
        if (!fs::is_directory(a.corpus)) throw UserError("corpus '" + a.corpus + "' is not a directory");
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(a.corpus))
            if (entry.path().extension() == ".cfg") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) corpus.push_back(load_graph(f.string()));
    } else {
        BenchConfig cfg;
        cfg.seed = a.seed;
        cfg.graphs = a.graphs;
        corpus = generate_corpus(cfg);
    }
    std::vector<std::string> analyses = a.analyses;
    if (analyses.empty())
        for (const auto& asset : load_corpus()) analyses.push_back(asset.name);
    for (const auto& name : analyses)
        if (!find_asset(name)) throw UserError("unknown analysis '" + name + "'");

    GroundTruth gt = validate_groundtruth(analyses, corpus, std::nullopt, a.threads);
    std::ostringstream os;
    if (fmt == ReportFormat::Json) {
        json j;
        j["graphs"] = corpus.size();
        j["runs"] = gt.runs;
        j["passed"] = gt.passed();
        j["mismatches"] = json::array();
        for (const auto& m : gt.mismatches) {
            j["mismatches"].push_back({{"analysis", m.analysis},
                                       {"graph", m.graph},
                                       {"traversal", m.traversal},
                                       {"node", m.node},
                                       {"against", m.against},
                                       {"expected", m.expected},
                                       {"actual", m.actual}});
        }
        os << j.dump(2) << '\n';
    } else if (fmt == ReportFormat::Csv) {
        os << "analysis,graph,traversal,node,against,expected,actual\n";
        for (const auto& m : gt.mismatches) {
            os << m.analysis << ',' << m.graph << ',' << m.traversal << ',' << m.node << ',' << m.against << ','
               << csv_quote(m.expected) << ',' << csv_quote(m.actual) << '\n';
        }
    } else {
        os << "validated " << gt.runs << " runs over " << corpus.size() << " graphs: " << gt.mismatches.size()
           << " mismatches\n";
        for (const auto& m : gt.mismatches) {
            os << "  " << m.analysis << ' ' << m.graph << ' ' << m.traversal << '[' << m.node << "] vs "
               << m.against << ": expected " << m.expected << " got " << m.actual << '\n';
        }
    }
    if (a.out.empty()) std::cout << os.str();
    else write_file(a.out, os.str());
    return gt.passed() ? kOk : kValidationFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Select and run CFG traversal strategies for DSL analyses"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Run an analysis on one graph");
    analyze->add_option("--analysis", an.analysis, "Shipped analysis code or DSL file")->required();
    analyze->add_option("--graph", an.graph, "CFG file")->required();
    analyze->add_option("--strategy", an.strategy, "Force a strategy (always with fixpoint confirmation)");
    analyze->add_flag("--no-optimize", an.no_optimize, "Keep the confirmation pass of single-pass plans");
    analyze->add_option("--format", an.format, "text, csv or json");

    std::string ex_analysis, ex_graph;
    auto* explain = app.add_subcommand("explain", "Show the selector's decision per traversal");
    explain->add_option("--analysis", ex_analysis, "Shipped analysis code or DSL file")->required();
    explain->add_option("--graph", ex_graph, "CFG file")->required();

    std::string pr_analysis;
    auto* props = app.add_subcommand("props", "Show the static properties per traversal");
    props->add_option("--analysis", pr_analysis, "Shipped analysis code or DSL file")->required();

    BenchArgs be;
    auto* bench = app.add_subcommand("bench", "Compare strategies over a generated corpus");
    bench->add_option("--config", be.config, "JSON bench configuration");
    bench->add_option("--seed", be.seed);
    bench->add_option("--graphs", be.graphs);
    bench->add_option("--min-size", be.min_size);
    bench->add_option("--max-size", be.max_size);
    bench->add_option("--analyses", be.analyses)->delimiter(',');
    bench->add_option("--strategies", be.strategies)->delimiter(',');
    bench->add_option("--metric", be.metric, "visits or time");
    bench->add_option("--mix", be.mix, "Weights of sequential,branch_only,loop_no_branch,loop_with_branch")
        ->delimiter(',');
    bench->add_option("--threads", be.threads, "Workers, 0 = all cores");
    bench->add_option("--format", be.format, "text, csv or json");
    bench->add_option("--out", be.out, "Write the report here instead of stdout");

    std::uint64_t gen_seed = 1;
    std::size_t gen_count = 1, gen_size = 10;
    std::string gen_class, gen_dir = ".";
    auto* gen = app.add_subcommand("gen", "Write seeded random CFG files");
    gen->add_option("--seed", gen_seed);
    gen->add_option("--count", gen_count);
    gen->add_option("--class", gen_class, "sequential, branch_only, loop_no_branch or loop_with_branch")->required();
    gen->add_option("--size", gen_size);
    gen->add_option("--out", gen_dir, "Output directory");

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Check HYBRID outputs against the oracles");
    validate->add_option("--corpus", va.corpus, "Directory of .cfg files (default: generated corpus)");
    validate->add_option("--seed", va.seed);
    validate->add_option("--graphs", va.graphs);
    validate->add_option("--analyses", va.analyses)->delimiter(',');
    validate->add_option("--threads", va.threads);
    validate->add_option("--format", va.format, "text, csv or json");
    validate->add_option("--out", va.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUserError;
    }

    try {
        if (*analyze) return cmd_analyze(an);
        if (*explain) return cmd_explain(ex_analysis, ex_graph);
        if (*props) return cmd_props(pr_analysis);
        if (*bench) return cmd_bench(be);
        if (*gen) return cmd_gen(gen_seed, gen_count, gen_class, gen_size, gen_dir);
        if (*validate) return cmd_validate(va);
    } catch (const DivergenceError& e) {
        std::cerr << "error: divergence: " << e.what() << '\n';
        return kInternalError;
    } catch (const DslRuntimeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternalError;
    } catch (const ParseError& e) {
        std::cerr << "error: parse: " << e.what() << '\n';
        return kUserError;
    } catch (const SelectionError& e) {
        std::cerr << "error: unsupported combination: " << e.what() << '\n';
        return kUserError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kInternalError;
}
