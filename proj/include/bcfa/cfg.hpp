#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcfa/errors.hpp"

namespace bcfa {

using NodeId = std::uint32_t;

/// A sequence of node ids; every ordering over a graph is a permutation of 0..N-1.
using Ordering = std::vector<NodeId>;

enum class StmtKind { Entry, Exit, Normal };

std::string_view to_string(StmtKind kind);

struct Stmt {
    StmtKind kind = StmtKind::Normal;
    std::set<std::string> defs;
    std::set<std::string> uses;
    std::set<std::string> exprs;
    std::optional<std::string> label;

    friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct Node {
    NodeId id = 0;
    Stmt stmt;
    std::vector<NodeId> preds; // edge insertion order
    std::vector<NodeId> succs; // edge insertion order

    friend bool operator==(const Node&, const Node&) = default;
};

enum class Cyclicity { Sequential, BranchOnly, LoopNoBranch, LoopWithBranch };

std::string_view to_string(Cyclicity c);
std::optional<Cyclicity> cyclicity_from_string(std::string_view s);

inline bool has_loop(Cyclicity c) {
    return c == Cyclicity::LoopNoBranch || c == Cyclicity::LoopWithBranch;
}

/// Flags a graph may declare about itself; they fix the cyclicity class once validated.
struct DeclaredFlags {
    bool loop = false;
    bool branch = false;

    Cyclicity cyclicity() const;

    friend bool operator==(const DeclaredFlags&, const DeclaredFlags&) = default;
};

class Cfg;

/// Accumulates nodes and edges, then validates everything at build().
class CfgBuilder {
public:
    explicit CfgBuilder(std::string name) : name_(std::move(name)) {}

    /// Appends a node with the next free id.
    NodeId add_node(Stmt stmt);

    /// Adds a node under an explicit id; ids may arrive in any order but must end up dense.
    void add_node(NodeId id, Stmt stmt);

    void add_edge(NodeId src, NodeId dst);

    Cfg build(std::optional<DeclaredFlags> declared = std::nullopt) &&;

private:
    std::string name_;
    std::vector<std::optional<Stmt>> stmts_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
};

/// Immutable, validated control flow graph.
///
/// Node ids are exactly 0..N-1, there is one entry without predecessors, at least
/// one exit without successors, and every node is reachable from the entry.
class Cfg {
public:
    const std::string& name() const { return name_; }
    std::size_t size() const { return nodes_.size(); }
    std::span<const Node> nodes() const { return nodes_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    NodeId entry() const { return entry_; }
    const std::vector<NodeId>& exits() const { return exits_; }
    bool is_exit(NodeId id) const { return nodes_.at(id).stmt.kind == StmtKind::Exit; }
    Cyclicity cyclicity() const { return cyclicity_; }
    bool declared() const { return declared_.has_value(); }
    std::optional<DeclaredFlags> declared_flags() const { return declared_; }
    /// Edges in insertion order; preds and succs lists follow this order.
    const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }

    friend bool operator==(const Cfg&, const Cfg&) = default;

private:
    friend class CfgBuilder;
    Cfg() = default;

    std::string name_;
    std::vector<Node> nodes_;
    NodeId entry_ = 0;
    std::vector<NodeId> exits_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    Cyclicity cyclicity_ = Cyclicity::Sequential;
    std::optional<DeclaredFlags> declared_;
};

// ---------------------------------------------------------------------------
// Structure queries

/// DFS from entry over successors (ascending id first) finished nodes.
Ordering post_order(const Cfg& g);
Ordering reverse_post_order(const Cfg& g);

/// DFS pre-order from entry, ascending-id descent.
Ordering dfs_pre_order(const Cfg& g);

/// Edges (u, v) where v is on the DFS stack when u explores it.
std::vector<std::pair<NodeId, NodeId>> back_edges(const Cfg& g);

/// dominators[v] holds every node that dominates v (including v).
std::vector<std::vector<bool>> dominators(const Cfg& g);

/// Structural class, ignoring any declared flags.
Cyclicity classify_cyclicity(const Cfg& g);

/// Same graph with every edge reversed; node `id` becomes `size() - 1 - id`.
/// The result is only structurally meaningful for single-exit graphs.
Cfg reversed(const Cfg& g);

// ---------------------------------------------------------------------------
// Text format

Cfg parse_cfg(std::string_view text);
Cfg load_cfg_file(const std::string& path);
std::string write_cfg(const Cfg& g);

// ---------------------------------------------------------------------------
// Random generation

/// Smallest size for which generate_random_cfg can produce the class.
std::size_t min_size(Cyclicity c);

/// Structured random CFG with exactly `size` nodes classified as `cls`.
///
/// Loops are bottom-tested (do-while), branches are if/if-else; ids follow
/// emission order. Deterministic for a given seed on every platform.
Cfg generate_random_cfg(std::uint64_t seed, std::size_t size, Cyclicity cls);

} // namespace bcfa
