#include <doctest.h>

#include <algorithm>
#include <queue>

#include "bcfa/cfg.hpp"
#include "graphs.hpp"

using namespace bcfa;
using testgraphs::make;

namespace {

// Kahn's algorithm: true when the graph has a cycle.
bool has_cycle(const Cfg& g) {
    std::vector<std::size_t> indeg(g.size());
    for (const auto& n : g.nodes()) indeg[n.id] = n.preds.size();
    std::queue<NodeId> q;
    for (NodeId v = 0; v < g.size(); ++v)
        if (indeg[v] == 0) q.push(v);
    std::size_t seen = 0;
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        ++seen;
        for (NodeId s : g.node(v).succs)
            if (--indeg[s] == 0) q.push(s);
    }
    return seen != g.size();
}

// d dominates v iff v is unreachable from entry once d is removed.
bool brute_dominates(const Cfg& g, NodeId d, NodeId v) {
    if (d == v) return true;
    if (d == g.entry()) return true;
    std::vector<bool> seen(g.size());
    std::vector<NodeId> stack{g.entry()};
    seen[g.entry()] = true;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId s : g.node(u).succs) {
            if (s == d || seen[s]) continue;
            seen[s] = true;
            stack.push_back(s);
        }
    }
    return !seen[v];
}

void check_symmetry(const Cfg& g) {
    for (const auto& n : g.nodes()) {
        for (NodeId s : n.succs) {
            const auto& p = g.node(s).preds;
            CHECK(std::count(p.begin(), p.end(), n.id) == 1);
        }
        for (NodeId p : n.preds) {
            const auto& s = g.node(p).succs;
            CHECK(std::count(s.begin(), s.end(), n.id) == 1);
        }
    }
}

const Cyclicity kClasses[] = {Cyclicity::Sequential, Cyclicity::BranchOnly, Cyclicity::LoopNoBranch,
                              Cyclicity::LoopWithBranch};

} // namespace

TEST_CASE("parse: two node chain is sequential") {
    Cfg g = parse_cfg("graph c\nnode 0 entry\nnode 1 exit\nedge 0 1\n");
    CHECK(g.size() == 2);
    CHECK(g.cyclicity() == Cyclicity::Sequential);
    CHECK(g.entry() == 0);
    CHECK(g.exits() == std::vector<NodeId>{1});
}

TEST_CASE("parse: diamond is branch only") {
    Cfg g = parse_cfg(R"(graph d   # comment
node 0 entry
node 1 normal def=a use=b,c expr=b+c label="a = b + c # not a comment"
node 2 normal
node 3 exit
edge 0 1
edge 0 2
edge 1 3
edge 2 3
)");
    CHECK(g.cyclicity() == Cyclicity::BranchOnly);
    CHECK(g.node(1).stmt.defs == std::set<std::string>{"a"});
    CHECK(g.node(1).stmt.uses == std::set<std::string>{"b", "c"});
    CHECK(g.node(1).stmt.exprs == std::set<std::string>{"b+c"});
    CHECK(*g.node(1).stmt.label == "a = b + c # not a comment");
}

TEST_CASE("parse: running example file is loop with branch") {
    Cfg g = load_cfg_file(BCFA_DATA_DIR "/running_example.cfg");
    CHECK(g.size() == 8);
    CHECK(g.cyclicity() == Cyclicity::LoopWithBranch);
    CHECK(classify_cyclicity(g) == Cyclicity::LoopWithBranch);
    CHECK(g.node(2).succs == std::vector<NodeId>{3, 4});
}

TEST_CASE("parse: errors") {
    auto parse_error_line = [](const char* text) -> std::size_t {
        try {
            parse_cfg(text);
        } catch (const ParseError& e) {
            return e.loc().line;
        }
        return 0;
    };
    CHECK(parse_error_line("graph g\nnode 0 entry\nnode x exit\n") == 3);
    CHECK(parse_error_line("graph g\nnode 0 bogus\n") == 2);
    CHECK(parse_error_line("node 0 entry\n") == 1);
    CHECK(parse_error_line("graph g\nnode 0 entry\nnode 0 exit\n") == 3);
    CHECK(parse_error_line("graph g flag\n") == 1);
    CHECK(parse_error_line("graph g\nnode 0 entry label=\"open\n") == 2);

    CHECK_THROWS_AS(parse_cfg("graph g\nnode 0 entry\nnode 1 exit\nedge 0 2\n"), CfgError);
    CHECK_THROWS_AS(parse_cfg("graph g\nnode 0 entry\nnode 1 normal\nnode 2 exit\nedge 0 2\n"), CfgError);
    CHECK_THROWS_AS(parse_cfg("graph g\nnode 0 entry\nnode 1 exit\nedge 0 1\nedge 1 0\n"), CfgError);
    CHECK_THROWS_AS(parse_cfg("graph g\nnode 0 entry\nnode 2 exit\nedge 0 2\n"), CfgError);
    CHECK_THROWS_AS(parse_cfg("graph g\nnode 0 entry def=a\nnode 1 exit\nedge 0 1\n"), CfgError);
    CHECK_THROWS_AS(parse_cfg("graph g\nnode 0 entry\nnode 1 exit\nedge 0 1\nedge 0 1\n"), CfgError);
}

TEST_CASE("declared flags fix and validate cyclicity") {
    const char* body = "node 0 entry\nnode 1 normal\nnode 2 normal\nnode 3 exit\n"
                       "edge 0 1\nedge 1 2\nedge 2 1\nedge 2 3\n";
    CHECK(parse_cfg(std::string("graph g loop\n") + body).cyclicity() == Cyclicity::LoopNoBranch);
    CHECK(parse_cfg(std::string("graph g loop branch\n") + body).cyclicity() == Cyclicity::LoopWithBranch);
    CHECK_THROWS_AS(parse_cfg(std::string("graph g branch\n") + body), CfgError);
    CHECK_THROWS_AS(parse_cfg("graph g loop\nnode 0 entry\nnode 1 exit\nedge 0 1\n"), CfgError);
    // a sequential graph needs ids in control-flow order
    CHECK_THROWS_AS(parse_cfg("graph g\nnode 0 entry\nnode 1 exit\nnode 2 normal\nedge 0 2\nedge 2 1\n"),
                    CfgError);
    CHECK(parse_cfg("graph g\nnode 0 entry\nnode 1 normal\nnode 2 exit\nnode 3 normal\nedge 0 1\nedge 0 3\n"
                    "edge 1 2\nedge 3 2\n")
              .cyclicity() == Cyclicity::BranchOnly);
}

TEST_CASE("write then parse is identity") {
    Cfg g = load_cfg_file(BCFA_DATA_DIR "/running_example.cfg");
    CHECK(parse_cfg(write_cfg(g)) == g);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Cfg r = generate_random_cfg(seed, 3 + seed % 20 + 2, kClasses[seed % 4]);
        CHECK(parse_cfg(write_cfg(r)) == r);
    }
}

TEST_CASE("post order and reverse post order") {
    CHECK(post_order(testgraphs::chain(3)) == Ordering{2, 1, 0});
    CHECK(reverse_post_order(testgraphs::chain(3)) == Ordering{0, 1, 2});
    CHECK(post_order(testgraphs::diamond()) == Ordering{3, 1, 2, 0});
    CHECK(reverse_post_order(testgraphs::diamond()) == Ordering{0, 2, 1, 3});

    // entry feeding the cycle 1 -> 2 -> 3 -> 1; the cycle head finishes last among the cycle
    Cfg cyc = make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 1}, {3, 4}});
    Ordering po = post_order(cyc);
    CHECK(po == Ordering{4, 3, 2, 1, 0});
    CHECK(back_edges(cyc) == std::vector<std::pair<NodeId, NodeId>>{{3, 1}});

    Cfg ex = testgraphs::running_example();
    CHECK(post_order(ex) == Ordering{7, 6, 1, 5, 3, 4, 2, 0});
    CHECK(back_edges(ex) == std::vector<std::pair<NodeId, NodeId>>{{1, 2}});
}

TEST_CASE("cyclicity of hand-built skeletons") {
    CHECK(classify_cyclicity(testgraphs::chain(5)) == Cyclicity::Sequential);
    CHECK(classify_cyclicity(testgraphs::diamond()) == Cyclicity::BranchOnly);
    CHECK(classify_cyclicity(testgraphs::while_loop()) == Cyclicity::LoopNoBranch);
    CHECK(classify_cyclicity(testgraphs::do_while()) == Cyclicity::LoopNoBranch);
    CHECK(classify_cyclicity(testgraphs::while_if_else()) == Cyclicity::LoopWithBranch);
    CHECK(classify_cyclicity(testgraphs::running_example()) == Cyclicity::LoopWithBranch);
    // a branch outside an otherwise plain loop
    CHECK(classify_cyclicity(make(6, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 3}, {4, 5}})) ==
          Cyclicity::LoopWithBranch);
    // two sequential loops, nested loops
    CHECK(classify_cyclicity(make(6, {{0, 1}, {1, 2}, {2, 1}, {2, 3}, {3, 4}, {4, 3}, {4, 5}})) ==
          Cyclicity::LoopNoBranch);
    CHECK(classify_cyclicity(make(5, {{0, 1}, {1, 2}, {2, 1}, {2, 3}, {3, 1}, {3, 4}})) ==
          Cyclicity::LoopNoBranch);
    // irreducible: two entries into the cycle 1 <-> 2
    CHECK(classify_cyclicity(make(4, {{0, 1}, {0, 2}, {1, 2}, {2, 1}, {2, 3}})) ==
          Cyclicity::LoopWithBranch);
    // loop with an early break to the same exit target: only one way out of the loop
    CHECK(classify_cyclicity(make(5, {{0, 1}, {1, 2}, {1, 4}, {2, 3}, {3, 1}, {3, 4}})) ==
          Cyclicity::LoopNoBranch);
    // break to a different target than the normal exit
    CHECK(classify_cyclicity(make(6, {{0, 1}, {1, 2}, {1, 4}, {2, 3}, {3, 1}, {3, 5}, {4, 5}})) ==
          Cyclicity::LoopWithBranch);
}

TEST_CASE("dominators agree with path removal") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Cfg g = generate_random_cfg(seed, 5 + seed % 12, kClasses[seed % 4]);
        auto dom = dominators(g);
        for (NodeId v = 0; v < g.size(); ++v)
            for (NodeId d = 0; d < g.size(); ++d) CHECK(dom[v][d] == brute_dominates(g, d, v));
    }
    Cfg irr = make(4, {{0, 1}, {0, 2}, {1, 2}, {2, 1}, {2, 3}});
    auto dom = dominators(irr);
    for (NodeId v = 0; v < 4; ++v)
        for (NodeId d = 0; d < 4; ++d) CHECK(dom[v][d] == brute_dominates(irr, d, v));
}

TEST_CASE("reversed flips ids and edges") {
    Cfg g = testgraphs::running_example();
    Cfg r = reversed(g);
    CHECK(r.entry() == 0);
    CHECK(r.exits() == std::vector<NodeId>{7});
    for (auto [u, v] : g.edges()) {
        const auto& s = r.node(7 - v).succs;
        CHECK(std::find(s.begin(), s.end(), 7 - u) != s.end());
    }
    CHECK(reversed(testgraphs::chain(4)).cyclicity() == Cyclicity::Sequential);
}

TEST_CASE("generator: sizes, determinism, minimum sizes") {
    Cfg two = generate_random_cfg(1, 2, Cyclicity::Sequential);
    CHECK(two.size() == 2);
    CHECK(two.node(0).succs == std::vector<NodeId>{1});
    CHECK(generate_random_cfg(7, 20, Cyclicity::LoopWithBranch) ==
          generate_random_cfg(7, 20, Cyclicity::LoopWithBranch));
    CHECK_FALSE(generate_random_cfg(7, 20, Cyclicity::BranchOnly) ==
                generate_random_cfg(8, 20, Cyclicity::BranchOnly));
    CHECK_THROWS_AS(generate_random_cfg(1, 4, Cyclicity::LoopWithBranch), CfgError);
    CHECK_THROWS_AS(generate_random_cfg(1, 3, Cyclicity::BranchOnly), CfgError);
    CHECK_THROWS_AS(generate_random_cfg(1, 1, Cyclicity::Sequential), CfgError);
}

TEST_CASE("generator: 1000 samples per class classify as requested") {
    for (Cyclicity c : kClasses) {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            std::size_t size = min_size(c) + seed % 40;
            Cfg g = generate_random_cfg(seed, size, c);
            REQUIRE(g.size() == size);
            CHECK(classify_cyclicity(g) == c);
            CHECK(has_loop(c) == has_cycle(g));
            CHECK(g.exits().size() == 1);
        }
    }
}

TEST_CASE("property: edge symmetry, rpo is reversed po, acyclic rpo is topological") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Cyclicity c = kClasses[seed % 4];
        Cfg g = generate_random_cfg(seed * 31 + 5, min_size(c) + seed % 30, c);
        check_symmetry(g);
        Ordering po = post_order(g);
        Ordering rpo = reverse_post_order(g);
        std::reverse(po.begin(), po.end());
        CHECK(po == rpo);
        Ordering sorted = rpo;
        std::sort(sorted.begin(), sorted.end());
        for (NodeId i = 0; i < g.size(); ++i) CHECK(sorted[i] == i);
        CHECK(back_edges(g).empty() == !has_cycle(g));
        if (!has_loop(c)) {
            std::vector<std::size_t> pos(g.size());
            for (std::size_t i = 0; i < rpo.size(); ++i) pos[rpo[i]] = i;
            for (auto [u, v] : g.edges()) CHECK(pos[u] < pos[v]);
        }
    }
}
