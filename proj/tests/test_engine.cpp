#include <doctest.h>

#include <cstdlib>

#include "bcfa/analyses.hpp"
#include "bcfa/engine.hpp"
#include "bcfa/props.hpp"
#include "bcfa/selector.hpp"
#include "graphs.hpp"

using namespace bcfa;
using dsl::Value;

namespace {

Value ints(std::initializer_list<int> xs) {
    std::vector<Value> v;
    for (int x : xs) v.push_back(Value::integer(x));
    return Value::set(std::move(v));
}

AnalysisProperties props_of(const std::string& src, std::size_t i = 0) {
    return extract_properties(dsl::parse_program(src)).entries.at(i).props;
}

dsl::TraversalDecl normalized(const std::string& src) {
    return dsl::normalize_three_address(dsl::parse_program(src).traversals.at(0));
}

const dsl::DslProgram& pdom() { return find_asset("PDOM")->program; }

} // namespace

// ---------------------------------------------------------------- props

TEST_CASE("must-alias environment") {
    auto names = [](const std::string& body) {
        return compute_aliases(normalized("t := traversal(n: Node) {\n" + body + "\n}")).names;
    };
    using S = std::set<std::string>;
    CHECK(names("m = n;") == S{"n", "node", "m"});
    CHECK(names("Set<int> s = {};") == S{"n", "node"});
    CHECK(names("m = n; if (true) m = n.succs;").count("m") == 0);
    CHECK(names("m = n; k = m; j = k;") == S{"n", "node", "m", "k", "j"});
    CHECK(names("k = m; m = n;") == S{"n", "node", "m", "k"});
    CHECK(names("foreach (m : n.succs) {}\nm = n;").count("m") == 0);
    CHECK(names("m = n.succs;").count("m") == 0);
}

TEST_CASE("data-flow sensitivity") {
    CHECK_FALSE(props_of(find_asset("PDOM")->source, 0).data_flow_sensitive);
    CHECK(props_of(find_asset("PDOM")->source, 1).data_flow_sensitive);
    CHECK_FALSE(props_of("t := traversal(n: Node): Set<int> { return output(n, t); }\ntraverse(g, t, FORWARD);")
                    .data_flow_sensitive);
    CHECK_FALSE(props_of("t := traversal(n: Node): Set<int> { m = n; return output(m, t); }\n"
                         "traverse(g, t, FORWARD);")
                    .data_flow_sensitive);
    CHECK(props_of("t := traversal(n: Node): Set<int> { foreach (p : n.preds) return output(p, t); return {}; }\n"
                   "traverse(g, t, FORWARD);")
              .data_flow_sensitive);
    // reading another traversal's output does not make the reader sensitive
    CHECK_FALSE(props_of("u := traversal(n: Node): int { return 1; }\n"
                         "t := traversal(n: Node): int { foreach (p : n.preds) return output(p, u); return 0; }\n"
                         "traverse(g, u, FORWARD);\ntraverse(g, t, FORWARD);",
                         1)
                    .data_flow_sensitive);
}

TEST_CASE("loop sensitivity") {
    auto lp = [](const std::string& body) {
        auto t = normalized("t := traversal(n: Node): Set<int> {\n" + body + "\n}");
        return detect_loop_sensitivity(t, compute_aliases(t));
    };
    CHECK_FALSE(lp("return {};"));
    CHECK(lp("Set<int> a = output(n, t); foreach (p : n.preds) a = union(a, output(p, t)); add(a, 1); return a;"));
    CHECK_FALSE(lp("Set<int> a = output(n, t); foreach (p : n.preds) a = union(a, output(p, t)); return a;"));
    CHECK_FALSE(lp("Set<int> a = output(n, t); foreach (p : n.preds) a = intersection(a, output(p, t)); "
                   "add(a, 1); return a;"));
    CHECK(lp("Set<int> a = output(n, t); foreach (p : n.preds) a = intersection(output(p, t), a); "
             "remove(a, 1); return a;"));
    // gen on a collection that is not an own-output variable does not count
    CHECK_FALSE(lp("Set<int> a = output(n, t); Set<int> b; foreach (p : n.preds) a = union(a, output(p, t)); "
                   "add(b, 1); return a;"));

    auto t = normalized("t := traversal(n: Node): Set<int> { Set<int> a = output(n, t); "
                        "foreach (p : n.preds) b = output(p, t); return a; }");
    OutputVarSets vars = output_variables(t, compute_aliases(t));
    CHECK(vars.v == std::set<std::string>{"a"});
    CHECK(vars.vp == std::set<std::string>{"b"});
}

TEST_CASE("extract_properties on the shipped corpus") {
    const auto iter = AnalysisProperties{false, false, Direction::Iterative};
    std::map<std::string, std::vector<AnalysisProperties>> expected{
        {"PDOM", {iter, {true, false, Direction::Backward}}}, {"DOM", {iter, {true, false, Direction::Forward}}},
        {"RD", {iter, {true, true, Direction::Forward}}},      {"LV", {iter, {true, true, Direction::Backward}}},
        {"AE", {iter, {true, true, Direction::Forward}}},      {"VBE", {iter, {true, true, Direction::Backward}}},
        {"UDV", {iter}},                                       {"COL", {{false, false, Direction::Forward}}},
    };
    REQUIRE(load_corpus().size() == 8);
    for (const auto& a : load_corpus()) {
        PropsReport r = extract_properties(a.program);
        std::vector<AnalysisProperties> got;
        for (const auto& e : r.entries) got.push_back(e.props);
        CHECK_MESSAGE(got == expected.at(a.name), a.name);
        CHECK(extract_properties(a.program) == r);
        for (const auto& e : r.entries) CHECK((!e.props.loop_sensitive || e.props.data_flow_sensitive));
    }
    CHECK(extract_properties(dsl::parse_program("")).entries.empty());
}

// ---------------------------------------------------------------- selector

TEST_CASE("decision tree is total and matches the path table") {
    struct Row {
        int path;
        Strategy s;
        bool single;
    };
    auto expected = [](bool flw, bool lp, Direction d, Cyclicity c) -> Row {
        bool fwd = d == Direction::Forward;
        if (!flw) return {11, Strategy::Any, true};
        switch (c) {
        case Cyclicity::Sequential: return fwd ? Row{1, Strategy::Inc, true} : Row{2, Strategy::Dec, true};
        case Cyclicity::BranchOnly: return fwd ? Row{3, Strategy::Rpo, true} : Row{4, Strategy::Po, true};
        case Cyclicity::LoopWithBranch:
            if (lp) return fwd ? Row{9, Strategy::Wrpo, false} : Row{10, Strategy::Wpo, false};
            return fwd ? Row{5, Strategy::Rpo, true} : Row{6, Strategy::Po, true};
        case Cyclicity::LoopNoBranch:
            if (lp) return fwd ? Row{9, Strategy::Wrpo, false} : Row{10, Strategy::Wpo, false};
            return fwd ? Row{7, Strategy::Inc, true} : Row{8, Strategy::Dec, true};
        }
        return {};
    };
    std::set<int> paths;
    for (bool flw : {false, true})
        for (bool lp : {false, true})
            for (Direction d : {Direction::Forward, Direction::Backward, Direction::Iterative})
                for (Cyclicity c : {Cyclicity::Sequential, Cyclicity::BranchOnly, Cyclicity::LoopNoBranch,
                                    Cyclicity::LoopWithBranch}) {
                    if (lp && !flw) continue;
                    AnalysisProperties p{flw, lp, d};
                    if (flw && d == Direction::Iterative) {
                        CHECK_THROWS_AS(select(p, c), SelectionError);
                        continue;
                    }
                    DecisionOutcome o = select(p, c);
                    Row r = expected(flw, lp, d, c);
                    CHECK(o.path == r.path);
                    CHECK(o.plan.strategy == r.s);
                    CHECK(o.plan.single_pass == r.single);
                    CHECK(o.plan.direction == d);
                    CHECK(o.plan.strategy != Strategy::Dfs);
                    CHECK(o.plan.single_pass == (o.path != 9 && o.path != 10));
                    if (flw && !lp) CHECK_FALSE(is_worklist(o.plan.strategy));
                    paths.insert(o.path);
                }
    CHECK(paths.size() == 11);
}

TEST_CASE("selector examples") {
    DecisionOutcome p6 = select({true, false, Direction::Backward}, Cyclicity::LoopWithBranch);
    CHECK(p6.path == 6);
    CHECK(p6.plan == ExecutionPlan{Strategy::Po, true, Direction::Backward});
    DecisionOutcome p9 = select({true, true, Direction::Forward}, Cyclicity::LoopNoBranch);
    CHECK(p9.path == 9);
    CHECK(p9.plan == ExecutionPlan{Strategy::Wrpo, false, Direction::Forward});
    // Lp is ignored on acyclic graphs
    CHECK(select({true, true, Direction::Forward}, Cyclicity::BranchOnly).path == 3);
    CHECK(select({false, false, Direction::Iterative}, Cyclicity::LoopWithBranch).path == 11);
}

// ---------------------------------------------------------------- engine

TEST_CASE("orderings") {
    Cfg c = testgraphs::chain(3);
    CHECK(make_ordering(c, Strategy::Dec) == Ordering{2, 1, 0});
    CHECK(make_ordering(c, Strategy::Rpo) == Ordering{0, 1, 2});
    CHECK(make_ordering(c, Strategy::Any) == Ordering{0, 1, 2});
    Cfg d = testgraphs::diamond();
    CHECK(make_ordering(d, Strategy::Po) == post_order(d));
    CHECK(make_ordering(d, Strategy::Dfs) == dfs_pre_order(d));
    CHECK_THROWS_AS(make_ordering(d, Strategy::Wpo), Error);
    CHECK_THROWS_AS(make_ordering(d, Strategy::Wrpo), Error);
}

TEST_CASE("optimized and confirming passes of domT on the running example") {
    Cfg g = testgraphs::running_example();
    const auto& p = pdom();
    for (bool single : {true, false}) {
        dsl::Session s(p, g);
        RunMetrics init = run_passes(s, p.traversals[0], {Strategy::Any, true, Direction::Iterative}, nullptr);
        CHECK(init.visits == 8);
        CHECK(s.global("allNodes") == ints({0, 1, 2, 3, 4, 5, 6, 7}));
        RunMetrics m = run_passes(s, p.traversals[1], {Strategy::Po, single, Direction::Backward}, &p.fixpoints[0]);
        CHECK(s.outputs(p.traversals[1])[2] == ints({1, 2, 5, 6, 7}));
        CHECK(s.outputs(p.traversals[1])[7] == ints({7}));
        CHECK(m.visits == (single ? 8u : 16u));
        CHECK(m.checks == (single ? 0u : 8u));
        CHECK(m.passes == (single ? 1u : 2u));
        CHECK(m.pushes == 0);
    }
}

TEST_CASE("worklist runs") {
    Cfg g = testgraphs::running_example();
    const auto& p = pdom();
    dsl::Session a(p, g), b(p, g);
    run_passes(a, p.traversals[0], {Strategy::Any, true, Direction::Iterative}, nullptr);
    run_passes(b, p.traversals[0], {Strategy::Any, true, Direction::Iterative}, nullptr);
    run_passes(a, p.traversals[1], {Strategy::Po, false, Direction::Backward}, &p.fixpoints[0]);
    RunMetrics w = run_worklist(b, p.traversals[1], Strategy::Wpo, Direction::Backward, &p.fixpoints[0]);
    CHECK(a.outputs(p.traversals[1]) == b.outputs(p.traversals[1]));
    CHECK(w.visits >= 8);
    CHECK(w.checks == w.visits - 8);

    // an insensitive body is visited exactly once per node
    const auto& udv = find_asset("UDV")->program;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Cfg r = generate_random_cfg(seed, 5 + seed, Cyclicity::LoopWithBranch);
        dsl::Session s(udv, r);
        RunMetrics m = run_worklist(s, udv.traversals[0], Strategy::Wrpo, Direction::Forward, nullptr);
        CHECK(m.visits == r.size());
        CHECK(m.pushes == 0);
        CHECK(m.passes == 1);
    }

    // RD propagation on a diamond: RPO seeding visits predecessors first
    const auto& rd = find_asset("RD")->program;
    Cfg d = testgraphs::diamond();
    dsl::Session s(rd, d);
    run_passes(s, rd.traversals[0], {Strategy::Any, true, Direction::Iterative}, nullptr);
    RunMetrics m = run_worklist(s, rd.traversals[1], Strategy::Wrpo, Direction::Forward, nullptr);
    CHECK(m.visits == d.size());
    CHECK(m.pushes == 0);

    CHECK_THROWS_AS(run_worklist(s, rd.traversals[1], Strategy::Po, Direction::Forward, nullptr), Error);
    CHECK_THROWS_AS(run_traversal(s, rd.traversals[1], {Strategy::Wpo, true, Direction::Forward}, nullptr), Error);
}

TEST_CASE("worklist only revisits nodes whose inputs changed") {
    // records every visit, then replays the trace to check each revisit was caused by a change
    const char* src = R"(trace: Seq<int>;
t := traversal(n: Node): Set<int> {
    add(trace, n.id);
    Set<int> x;
    if (output(n, t) != null) x = output(n, t);
    foreach (p : n.preds) x = union(x, output(p, t));
    add(x, n.id);
    return x;
}
traverse(g, t, FORWARD);
)";
    dsl::DslProgram p = dsl::parse_program(src);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Cfg g = generate_random_cfg(seed, 5 + seed % 15, seed % 2 ? Cyclicity::LoopWithBranch : Cyclicity::LoopNoBranch);
        dsl::Session s(p, g);
        RunMetrics m = run_worklist(s, p.traversals[0], Strategy::Wrpo, Direction::Forward, nullptr);
        const auto& trace = s.global("trace").items();
        REQUIRE(trace.size() == m.visits);

        dsl::Session replay(p, g);
        auto& out = replay.outputs(p.traversals[0]);
        std::vector<std::size_t> last_visit(g.size(), SIZE_MAX), last_change(g.size(), 0);
        for (std::size_t step = 0; step < trace.size(); ++step) {
            NodeId v = static_cast<NodeId>(trace[step].as_int());
            if (last_visit[v] != SIZE_MAX) {
                bool caused = false;
                for (NodeId q : g.node(v).preds) caused = caused || last_change[q] > last_visit[v];
                CHECK(caused);
            }
            Value next = replay.eval_traversal(p.traversals[0], v);
            if (last_visit[v] == SIZE_MAX || next != out[v]) last_change[v] = step + 1;
            out[v] = next;
            last_visit[v] = step + 1;
        }
    }
}

TEST_CASE("divergence guard") {
    dsl::DslProgram p = dsl::parse_program(R"(c: int;
t := traversal(n: Node): int {
    Node last;
    foreach (q : n.preds) last = q;
    if (last != null) if (output(last, t) != null) c = c + 1;
    c = c + 1;
    return c;
}
traverse(g, t, FORWARD);
)");
    Cfg g = testgraphs::while_loop();
    {
        dsl::Session s(p, g);
        CHECK_THROWS_AS(run_passes(s, p.traversals[0], {Strategy::Rpo, false, Direction::Forward}, nullptr,
                                   EngineOptions{3}),
                        DivergenceError);
    }
    {
        dsl::Session s(p, g);
        CHECK_THROWS_AS(run_passes(s, p.traversals[0], {Strategy::Rpo, false, Direction::Forward}, nullptr),
                        DivergenceError);
    }
    {
        dsl::Session s(p, g);
        CHECK_THROWS_WITH_AS(run_worklist(s, p.traversals[0], Strategy::Wrpo, Direction::Forward, nullptr,
                                          EngineOptions{2}),
                             doctest::Contains("worklist visits"), DivergenceError);
    }
    {
        dsl::Session s(p, g);
        // a single pass never diverges
        CHECK(run_passes(s, p.traversals[0], {Strategy::Rpo, true, Direction::Forward}, nullptr, EngineOptions{1})
                  .visits == g.size());
    }
    CHECK(EngineOptions{}.ceiling(7) == 70);
    CHECK(EngineOptions{4}.ceiling(7) == 4);
}

TEST_CASE("BCFA_MAX_PASSES") {
    ::unsetenv("BCFA_MAX_PASSES");
    CHECK(options_from_env().max_passes == 0);
    ::setenv("BCFA_MAX_PASSES", "5", 1);
    CHECK(options_from_env().max_passes == 5);
    for (const char* bad : {"0", "-1", "abc", "5x", ""}) {
        ::setenv("BCFA_MAX_PASSES", bad, 1);
        CHECK_THROWS_AS(options_from_env(), Error);
    }
    ::unsetenv("BCFA_MAX_PASSES");
}

TEST_CASE("execute_analysis") {
    const auto& p = pdom();
    std::vector<ExecutionPlan> plans{{Strategy::Any, true, {}}, {Strategy::Po, true, {}}};
    ExecutionResult r = execute_analysis(p, testgraphs::running_example(), plans);
    CHECK(r.outputs.at("domT")[7] == ints({7}));
    CHECK(r.outputs.at("domT")[2] == ints({1, 2, 5, 6, 7}));
    CHECK(r.globals.at("allNodes") == ints({0, 1, 2, 3, 4, 5, 6, 7}));
    REQUIRE(r.per_invocation.size() == 2);
    CHECK(r.total.visits == 16);

    ExecutionResult two = execute_analysis(p, testgraphs::chain(2), plans);
    CHECK(two.outputs.at("domT") == dsl::OutputMap{ints({0, 1}), ints({1})});

    ExecutionResult none = execute_analysis(dsl::parse_program(""), testgraphs::chain(3), {});
    CHECK(none.outputs.empty());
    CHECK(none.total.visits == 0);

    CHECK_THROWS_AS(execute_analysis(p, testgraphs::chain(2), {plans[0]}), Error);

    // metrics are deterministic
    ExecutionResult again = execute_analysis(p, testgraphs::running_example(), plans);
    CHECK(again.total == r.total);
    CHECK(again.per_invocation == r.per_invocation);
}
