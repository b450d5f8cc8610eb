#pragma once

#include <string_view>
#include <unordered_map>
#include <vector>

#include "bcfa/cfg.hpp"
#include "bcfa/dsl/ast.hpp"
#include "bcfa/dsl/value.hpp"

namespace bcfa::dsl {

/// Per-traversal outputs indexed by node id; Null means "no output yet".
using OutputMap = std::vector<Value>;

/// Evaluation state of one program on one graph: outputs of every traversal
/// plus the global variables. Single-threaded; create one per graph.
class Session {
public:
    Session(const DslProgram& p, const Cfg& g);

    const DslProgram& program() const { return p_; }
    const Cfg& graph() const { return g_; }

    /// Runs the body of `t` for node `n` and returns its result (Null without a return type).
    /// When `reads` is given, it receives the ids n' of every output(n', t) the body evaluated.
    Value eval_traversal(const TraversalDecl& t, NodeId n, std::vector<NodeId>* reads = nullptr);

    /// `f == nullptr` selects the default check, structural equality.
    bool eval_fixpoint(const FixpointDecl* f, const Value& current, const Value& previous);

    OutputMap& outputs(const TraversalDecl& t);
    const OutputMap& outputs(std::string_view traversal) const;
    const Value& global(std::string_view name) const;

private:
    friend class Evaluator;

    const DslProgram& p_;
    const Cfg& g_;
    std::vector<OutputMap> outputs_;       // parallel to p_.traversals
    std::vector<Value> globals_;           // parallel to p_.globals
    std::unordered_map<std::string_view, std::size_t> traversal_index_;
    // cached node fields
    std::vector<Value> preds_, succs_, defs_, uses_, exprs_;
    Value all_nodes_;
};

} // namespace bcfa::dsl
