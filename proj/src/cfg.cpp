#include "bcfa/cfg.hpp"

#include <algorithm>
#include <map>

namespace bcfa {

std::string_view to_string(StmtKind kind) {
    switch (kind) {
    case StmtKind::Entry: return "entry";
    case StmtKind::Exit: return "exit";
    case StmtKind::Normal: return "normal";
    }
    return "normal";
}

std::string_view to_string(Cyclicity c) {
    switch (c) {
    case Cyclicity::Sequential: return "sequential";
    case Cyclicity::BranchOnly: return "branch_only";
    case Cyclicity::LoopNoBranch: return "loop_no_branch";
    case Cyclicity::LoopWithBranch: return "loop_with_branch";
    }
    return "sequential";
}

std::optional<Cyclicity> cyclicity_from_string(std::string_view s) {
    for (auto c : {Cyclicity::Sequential, Cyclicity::BranchOnly, Cyclicity::LoopNoBranch,
                   Cyclicity::LoopWithBranch}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

Cyclicity DeclaredFlags::cyclicity() const {
    if (loop) return branch ? Cyclicity::LoopWithBranch : Cyclicity::LoopNoBranch;
    return branch ? Cyclicity::BranchOnly : Cyclicity::Sequential;
}

// ---------------------------------------------------------------------------
// Builder

NodeId CfgBuilder::add_node(Stmt stmt) {
    auto id = static_cast<NodeId>(stmts_.size());
    stmts_.emplace_back(std::move(stmt));
    return id;
}

void CfgBuilder::add_node(NodeId id, Stmt stmt) {
    if (id >= stmts_.size()) stmts_.resize(id + 1);
    if (stmts_[id]) throw CfgError("duplicate node id " + std::to_string(id));
    stmts_[id] = std::move(stmt);
}

void CfgBuilder::add_edge(NodeId src, NodeId dst) { edges_.emplace_back(src, dst); }

namespace {

bool structurally_sequential(const Cfg& g) {
    return std::all_of(g.nodes().begin(), g.nodes().end(), [](const Node& n) {
        return n.succs.size() <= 1 && n.preds.size() <= 1;
    });
}

} // namespace

Cfg CfgBuilder::build(std::optional<DeclaredFlags> declared) && {
    Cfg g;
    g.name_ = std::move(name_);
    g.nodes_.resize(stmts_.size());
    for (NodeId id = 0; id < stmts_.size(); ++id) {
        if (!stmts_[id]) throw CfgError("node ids must be dense: missing id " + std::to_string(id));
        g.nodes_[id].id = id;
        g.nodes_[id].stmt = std::move(*stmts_[id]);
    }
    if (g.nodes_.empty()) throw CfgError("graph has no nodes");

    for (auto [src, dst] : edges_) {
        if (src >= g.nodes_.size() || dst >= g.nodes_.size()) {
            throw CfgError("edge " + std::to_string(src) + " -> " + std::to_string(dst) +
                           " references an unknown node");
        }
        auto& succs = g.nodes_[src].succs;
        if (std::find(succs.begin(), succs.end(), dst) != succs.end()) {
            throw CfgError("duplicate edge " + std::to_string(src) + " -> " + std::to_string(dst));
        }
        succs.push_back(dst);
        g.nodes_[dst].preds.push_back(src);
    }
    g.edges_ = std::move(edges_);

    std::optional<NodeId> entry;
    for (const auto& n : g.nodes_) {
        const auto& s = n.stmt;
        for (const auto* names : {&s.defs, &s.uses, &s.exprs}) {
            for (const auto& name : *names) {
                if (name.empty()) throw CfgError("empty name at node " + std::to_string(n.id));
            }
        }
        if (s.kind == StmtKind::Normal) continue;
        if (!s.defs.empty() || !s.uses.empty() || !s.exprs.empty()) {
            throw CfgError("entry/exit node " + std::to_string(n.id) + " must not carry defs, uses or exprs");
        }
        if (s.kind == StmtKind::Entry) {
            if (entry) throw CfgError("more than one entry node");
            entry = n.id;
            if (!n.preds.empty()) throw CfgError("entry node " + std::to_string(n.id) + " has predecessors");
        } else {
            if (!n.succs.empty()) throw CfgError("exit node " + std::to_string(n.id) + " has successors");
            g.exits_.push_back(n.id);
        }
    }
    if (!entry) throw CfgError("graph has no entry node");
    if (g.exits_.empty()) throw CfgError("graph has no exit node");
    g.entry_ = *entry;

    std::vector<bool> seen(g.nodes_.size(), false);
    std::vector<NodeId> stack{g.entry_};
    seen[g.entry_] = true;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : g.nodes_[u].succs) {
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    for (NodeId id = 0; id < seen.size(); ++id) {
        if (!seen[id]) throw CfgError("node " + std::to_string(id) + " is unreachable from entry");
    }

    Cyclicity structural = classify_cyclicity(g);
    if (declared) {
        bool loop = has_loop(structural);
        if (declared->loop != loop) {
            throw CfgError(declared->loop ? "graph declares a loop but has no back edge"
                                          : "graph declares no loop but has a back edge");
        }
        if (!loop && declared->cyclicity() != structural) {
            throw CfgError("declared branch flag disagrees with the acyclic structure");
        }
        g.cyclicity_ = declared->cyclicity();
        g.declared_ = declared;
    } else {
        g.cyclicity_ = structural;
    }

    if (g.cyclicity_ == Cyclicity::Sequential) {
        for (const auto& n : g.nodes_) {
            for (NodeId s : n.succs) {
                if (s <= n.id) {
                    throw CfgError("sequential graph must have increasing ids along edges (" +
                                   std::to_string(n.id) + " -> " + std::to_string(s) + ")");
                }
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Depth-first orderings

namespace {

struct DfsResult {
    Ordering pre;
    Ordering post;
    std::vector<std::pair<NodeId, NodeId>> back;
};

std::vector<NodeId> sorted_succs(const Node& n) {
    std::vector<NodeId> s = n.succs;
    std::sort(s.begin(), s.end());
    return s;
}

DfsResult depth_first(const Cfg& g) {
    enum class Mark : std::uint8_t { White, Grey, Black };
    DfsResult r;
    std::vector<Mark> mark(g.size(), Mark::White);
    std::vector<std::vector<NodeId>> succs(g.size());
    for (const auto& n : g.nodes()) succs[n.id] = sorted_succs(n);

    // (node, index of next successor to explore)
    std::vector<std::pair<NodeId, std::size_t>> stack;
    stack.emplace_back(g.entry(), 0);
    mark[g.entry()] = Mark::Grey;
    r.pre.push_back(g.entry());
    while (!stack.empty()) {
        auto& [u, next] = stack.back();
        if (next == succs[u].size()) {
            mark[u] = Mark::Black;
            r.post.push_back(u);
            stack.pop_back();
            continue;
        }
        NodeId v = succs[u][next++];
        if (mark[v] == Mark::Grey) {
            r.back.emplace_back(u, v);
        } else if (mark[v] == Mark::White) {
            mark[v] = Mark::Grey;
            r.pre.push_back(v);
            stack.emplace_back(v, 0);
        }
    }
    return r;
}

} // namespace

Ordering post_order(const Cfg& g) { return depth_first(g).post; }

Ordering reverse_post_order(const Cfg& g) {
    Ordering o = post_order(g);
    std::reverse(o.begin(), o.end());
    return o;
}

Ordering dfs_pre_order(const Cfg& g) { return depth_first(g).pre; }

std::vector<std::pair<NodeId, NodeId>> back_edges(const Cfg& g) { return depth_first(g).back; }

std::vector<std::vector<bool>> dominators(const Cfg& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
    dom[g.entry()].assign(n, false);
    dom[g.entry()][g.entry()] = true;

    Ordering rpo = reverse_post_order(g);
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId v : rpo) {
            if (v == g.entry()) continue;
            std::vector<bool> next(n, true);
            for (NodeId p : g.node(v).preds) {
                for (std::size_t i = 0; i < n; ++i) next[i] = next[i] && dom[p][i];
            }
            next[v] = true;
            if (next != dom[v]) {
                dom[v] = std::move(next);
                changed = true;
            }
        }
    }
    return dom;
}

// ---------------------------------------------------------------------------
// Cyclicity

namespace {

struct Loop {
    NodeId header;
    std::vector<bool> body;
    std::size_t count = 0;
};

} // namespace

Cyclicity classify_cyclicity(const Cfg& g) {
    auto back = back_edges(g);
    if (back.empty()) {
        return structurally_sequential(g) ? Cyclicity::Sequential : Cyclicity::BranchOnly;
    }

    const std::size_t n = g.size();
    auto dom = dominators(g);

    // Natural loops, merged per header.
    std::map<NodeId, Loop> loops;
    for (auto [src, header] : back) {
        if (!dom[src][header]) return Cyclicity::LoopWithBranch; // irreducible
        auto [it, fresh] = loops.try_emplace(header, Loop{header, std::vector<bool>(n, false)});
        Loop& loop = it->second;
        loop.body[header] = true;
        std::vector<NodeId> work;
        if (!loop.body[src]) {
            loop.body[src] = true;
            work.push_back(src);
        }
        while (!work.empty()) {
            NodeId u = work.back();
            work.pop_back();
            for (NodeId p : g.node(u).preds) {
                if (!loop.body[p]) {
                    loop.body[p] = true;
                    work.push_back(p);
                }
            }
        }
    }

    std::vector<const Loop*> order;
    for (auto& [h, loop] : loops) {
        loop.count = static_cast<std::size_t>(std::count(loop.body.begin(), loop.body.end(), true));
        order.push_back(&loop);
    }
    // Innermost first: natural loops with distinct headers are nested or disjoint.
    std::sort(order.begin(), order.end(),
              [](const Loop* a, const Loop* b) { return a->count < b->count; });

    // innermost[v] = index into `order` of the smallest loop holding v, or -1 at top level.
    std::vector<int> innermost(n, -1);
    std::vector<int> parent(order.size(), -1);
    for (int i = 0; i < static_cast<int>(order.size()); ++i) {
        for (NodeId v = 0; v < n; ++v) {
            if (order[i]->body[v] && innermost[v] == -1) innermost[v] = i;
        }
        for (int j = i + 1; j < static_cast<int>(order.size()); ++j) {
            if (order[j]->body[order[i]->header]) {
                parent[i] = j;
                break;
            }
        }
    }

    // The element of region `region` (-1 = whole graph) that holds v: v itself when
    // v sits directly in the region, otherwise the child loop containing it.
    auto element_of = [&](int region, NodeId v) -> long {
        int loop = innermost[v];
        if (loop == region) return static_cast<long>(v);
        while (loop != -1 && parent[loop] != region) loop = parent[loop];
        if (loop == -1) return -1; // v lies outside the region
        return static_cast<long>(n) + loop;
    };

    std::vector<int> regions{-1};
    for (int i = 0; i < static_cast<int>(order.size()); ++i) regions.push_back(i);
    for (int region : regions) {
        std::map<long, std::set<long>> targets;
        for (NodeId u = 0; u < n; ++u) {
            if (region != -1 && !order[region]->body[u]) continue;
            long from = element_of(region, u);
            for (NodeId v : g.node(u).succs) {
                if (region != -1 && v == order[region]->header) continue; // back edge
                if (region != -1 && !order[region]->body[v]) continue;    // leaves the region
                long to = element_of(region, v);
                if (to == -1 || to == from) continue;
                targets[from].insert(to);
                if (targets[from].size() >= 2) return Cyclicity::LoopWithBranch;
            }
        }
    }
    return Cyclicity::LoopNoBranch;
}

Cfg reversed(const Cfg& g) {
    const auto flip = [&](NodeId id) { return static_cast<NodeId>(g.size() - 1 - id); };
    CfgBuilder b(g.name() + ".rev");
    for (const auto& n : g.nodes()) {
        Stmt s = n.stmt;
        if (s.kind == StmtKind::Entry) s.kind = StmtKind::Exit;
        else if (s.kind == StmtKind::Exit) s.kind = StmtKind::Entry;
        b.add_node(flip(n.id), std::move(s));
    }
    for (const auto& n : g.nodes()) {
        for (NodeId p : n.preds) b.add_edge(flip(n.id), flip(p));
    }
    return std::move(b).build();
}

} // namespace bcfa
