#include "bcfa/dsl/interp.hpp"

#include <algorithm>

namespace bcfa::dsl {

namespace {

Value string_set(const std::set<std::string>& items) {
    std::vector<Value> out;
    out.reserve(items.size());
    for (const auto& s : items) out.push_back(Value::string(s));
    return Value::set(std::move(out));
}

Value node_seq(const std::vector<NodeId>& ids) {
    std::vector<Value> out;
    out.reserve(ids.size());
    for (NodeId id : ids) out.push_back(Value::node(id));
    return Value::seq(std::move(out));
}

Value default_value(const TypeRef& t) {
    switch (t.kind) {
    case TypeRef::Kind::Int: return Value::integer(0);
    case TypeRef::Kind::Bool: return Value::boolean(false);
    case TypeRef::Kind::String: return Value::string("");
    case TypeRef::Kind::Node: return Value();
    case TypeRef::Kind::Set: return Value::set();
    case TypeRef::Kind::Seq: return Value::seq();
    }
    return Value();
}

[[noreturn]] void runtime(const std::string& what, SourceLoc loc) { throw DslRuntimeError(what, loc); }

} // namespace

// Walks one body. Locals live in a flat list searched from the back, which is
// cheap for the handful of variables analyses use.
class Evaluator {
public:
    Evaluator(Session& s, const TraversalDecl* t, NodeId node, std::vector<NodeId>* reads)
        : s_(s), traversal_(t), node_(node), reads_(reads) {}

    Value run(const Body& body) {
        Value result;
        exec(body, result);
        return result;
    }

    void bind(const std::string& name, Value v) { locals_.emplace_back(&name, std::move(v)); }

private:
    enum class Flow { Next, Return };

    Flow exec(const Body& body, Value& result) {
        for (const auto& st : body)
            if (exec(st, result) == Flow::Return) return Flow::Return;
        return Flow::Next;
    }

    Flow exec(const Statement& st, Value& result) {
        switch (st.kind) {
        case Statement::Kind::VarDecl:
            set_local(st.name, st.expr ? eval(*st.expr) : default_value(*st.type));
            return Flow::Next;
        case Statement::Kind::Assign:
            assign(st.name, eval(*st.expr));
            return Flow::Next;
        case Statement::Kind::If: {
            Value c = eval(*st.expr);
            if (c.kind() != Value::Kind::Bool) {
                runtime("if condition is " + std::string(to_string(c.kind())) + ", expected bool", st.expr->loc);
            }
            return exec(c.as_bool() ? st.body : st.else_body, result);
        }
        case Statement::Kind::Foreach: {
            Value coll = eval(*st.expr);
            if (coll.is_null()) runtime("null dereference: foreach over null", st.expr->loc);
            if (!coll.is_collection()) {
                runtime("foreach over " + std::string(to_string(coll.kind())) + ", expected a collection",
                        st.expr->loc);
            }
            std::size_t mark = locals_.size();
            locals_.emplace_back(&st.name, Value());
            for (const auto& item : coll.items()) {
                locals_[mark].second = item;
                if (exec(st.body, result) == Flow::Return) {
                    locals_.resize(mark);
                    return Flow::Return;
                }
            }
            locals_.resize(mark);
            return Flow::Next;
        }
        case Statement::Kind::Return:
            result = st.expr ? eval(*st.expr) : Value();
            return Flow::Return;
        case Statement::Kind::ExprStmt:
            eval(*st.expr);
            return Flow::Next;
        case Statement::Kind::Block:
            return exec(st.body, result);
        }
        return Flow::Next;
    }

    Value* find_local(std::string_view name) {
        for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
            if (*it->first == name) return &it->second;
        return nullptr;
    }

    Value* find_global(std::string_view name) {
        const auto& gs = s_.p_.globals;
        for (std::size_t i = 0; i < gs.size(); ++i)
            if (gs[i].name == name) return &s_.globals_[i];
        return nullptr;
    }

    void set_local(const std::string& name, Value v) {
        if (Value* slot = find_local(name)) *slot = std::move(v);
        else locals_.emplace_back(&name, std::move(v));
    }

    void assign(const std::string& name, Value v) {
        if (Value* slot = find_local(name)) *slot = std::move(v);
        else if (Value* g = find_global(name)) *g = std::move(v);
        else locals_.emplace_back(&name, std::move(v));
    }

    Value& lvalue(const Expr& e) {
        if (Value* slot = find_local(e.name)) return *slot;
        if (Value* g = find_global(e.name)) return *g;
        runtime("unknown variable '" + e.name + "'", e.loc);
    }

    Value lookup(const Expr& e) {
        if (Value* slot = find_local(e.name)) return *slot;
        if (traversal_) {
            if (e.name == traversal_->param || e.name == "node") return Value::node(node_);
            if (e.name == "exitNodeId") {
                NodeId exit = s_.g_.is_exit(node_) ? node_ : s_.g_.exits().front();
                return Value::integer(exit);
            }
            if (e.name == "entryNodeId") return Value::integer(s_.g_.entry());
        }
        if (Value* g = find_global(e.name)) return *g;
        runtime("unknown variable '" + e.name + "'", e.loc);
    }

    Value eval(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit: return Value::integer(e.int_value);
        case Expr::Kind::BoolLit: return Value::boolean(e.bool_value);
        case Expr::Kind::StrLit: return Value::string(e.name);
        case Expr::Kind::Null: return Value();
        case Expr::Kind::Ident: return lookup(e);
        case Expr::Kind::Field: return field(e);
        case Expr::Kind::Call: return call(e);
        case Expr::Kind::SetLit: {
            std::vector<Value> items;
            items.reserve(e.args.size());
            for (const auto& a : e.args) items.push_back(eval(a));
            return Value::set(std::move(items));
        }
        case Expr::Kind::Unary: {
            Value v = eval(e.args[0]);
            if (e.name == "!") return Value::boolean(!want(v, Value::Kind::Bool, e).as_bool());
            return Value::integer(-want(v, Value::Kind::Int, e).as_int());
        }
        case Expr::Kind::Binary: return binary(e);
        }
        return Value();
    }

    const Value& want(const Value& v, Value::Kind k, const Expr& at) {
        if (v.kind() != k) {
            runtime("type mismatch: operator '" + at.name + "' got " + std::string(to_string(v.kind())) +
                        ", expected " + std::string(to_string(k)),
                    at.loc);
        }
        return v;
    }

    Value binary(const Expr& e) {
        const std::string& op = e.name;
        if (op == "&&" || op == "||") {
            bool l = want(eval(e.args[0]), Value::Kind::Bool, e).as_bool();
            if (op == "&&" ? !l : l) return Value::boolean(l);
            return Value::boolean(want(eval(e.args[1]), Value::Kind::Bool, e).as_bool());
        }
        Value l = eval(e.args[0]);
        Value r = eval(e.args[1]);
        if (op == "==") return Value::boolean(l == r);
        if (op == "!=") return Value::boolean(l != r);
        if (op == "+" && l.kind() == Value::Kind::Str) {
            return Value::string(l.as_string() + want(r, Value::Kind::Str, e).as_string());
        }
        std::int64_t a = want(l, Value::Kind::Int, e).as_int();
        std::int64_t b = want(r, Value::Kind::Int, e).as_int();
        if (op == "+") return Value::integer(a + b);
        if (op == "-") return Value::integer(a - b);
        if (op == "<") return Value::boolean(a < b);
        if (op == ">") return Value::boolean(a > b);
        if (op == "<=") return Value::boolean(a <= b);
        return Value::boolean(a >= b);
    }

    Value field(const Expr& e) {
        const Expr& obj = e.args[0];
        if (obj.kind == Expr::Kind::Ident && obj.name == "g" && !find_local("g")) {
            if (e.name == "nodes") return s_.all_nodes_;
            runtime("unknown graph field '" + e.name + "'", e.loc);
        }
        Value v = eval(obj);
        if (v.is_null()) runtime("null dereference: field '" + e.name + "' of null", e.loc);
        if (v.kind() != Value::Kind::Node) {
            runtime("field '" + e.name + "' on " + std::string(to_string(v.kind())), e.loc);
        }
        NodeId id = v.as_node();
        if (e.name == "id") return Value::integer(id);
        if (e.name == "succs") return s_.succs_[id];
        if (e.name == "preds") return s_.preds_[id];
        if (e.name == "defs") return s_.defs_[id];
        if (e.name == "uses") return s_.uses_[id];
        if (e.name == "exprs") return s_.exprs_[id];
        if (e.name == "kind") return Value::string(std::string(to_string(s_.g_.node(id).stmt.kind)));
        if (e.name == "label") return Value::string(s_.g_.node(id).stmt.label.value_or(""));
        runtime("unknown node field '" + e.name + "'", e.loc);
    }

    const Value& collection_arg(const Value& v, const Expr& call, std::size_t index) {
        if (v.is_null()) {
            runtime("null dereference: " + call.name + " on a null collection", call.args[index].loc);
        }
        if (!v.is_collection()) {
            runtime("type mismatch: " + call.name + " expects a collection, got " +
                        std::string(to_string(v.kind())),
                    call.args[index].loc);
        }
        return v;
    }

    Value call(const Expr& e) {
        const std::string& f = e.name;
        if (f == "output") {
            Value n = eval(e.args[0]);
            if (n.is_null()) runtime("null dereference: output of a null node", e.args[0].loc);
            if (n.kind() != Value::Kind::Node) {
                runtime("output expects a Node, got " + std::string(to_string(n.kind())), e.args[0].loc);
            }
            auto it = s_.traversal_index_.find(e.args[1].name);
            if (it == s_.traversal_index_.end()) runtime("unknown traversal '" + e.args[1].name + "'", e.loc);
            if (reads_ && traversal_ && traversal_->name == e.args[1].name) reads_->push_back(n.as_node());
            return s_.outputs_[it->second][n.as_node()];
        }
        if (f == "add" || f == "remove" || f == "addAll" || f == "removeAll") {
            Value arg = eval(e.args[1]);
            Value& target = lvalue(e.args[0]);
            collection_arg(target, e, 0);
            if (f == "add") {
                target.insert(std::move(arg));
            } else if (f == "remove") {
                target.erase(arg);
            } else if (!arg.is_null()) {
                collection_arg(arg, e, 1);
                if (f == "addAll") target.insert_all(arg);
                else target.erase_all(arg);
            }
            return Value();
        }
        if (f == "union" || f == "intersection") {
            Value a = eval(e.args[0]);
            Value b = eval(e.args[1]);
            if (!a.is_null()) collection_arg(a, e, 0);
            if (!b.is_null()) collection_arg(b, e, 1);
            return f == "union" ? set_union(a, b) : set_intersection(a, b);
        }
        if (f == "equals") return Value::boolean(eval(e.args[0]) == eval(e.args[1]));
        if (f == "contains") {
            Value c = eval(e.args[0]);
            collection_arg(c, e, 0);
            return Value::boolean(c.contains(eval(e.args[1])));
        }
        if (f == "size") {
            Value c = eval(e.args[0]);
            collection_arg(c, e, 0);
            return Value::integer(static_cast<std::int64_t>(c.items().size()));
        }
        runtime("unknown function '" + f + "'", e.loc);
    }

    Session& s_;
    const TraversalDecl* traversal_;
    NodeId node_;
    std::vector<NodeId>* reads_;
    std::vector<std::pair<const std::string*, Value>> locals_;
};

Session::Session(const DslProgram& p, const Cfg& g) : p_(p), g_(g) {
    outputs_.assign(p.traversals.size(), OutputMap(g.size()));
    for (std::size_t i = 0; i < p.traversals.size(); ++i) traversal_index_.emplace(p.traversals[i].name, i);
    for (const auto& node : g.nodes()) {
        preds_.push_back(node_seq(node.preds));
        succs_.push_back(node_seq(node.succs));
        defs_.push_back(string_set(node.stmt.defs));
        uses_.push_back(string_set(node.stmt.uses));
        exprs_.push_back(string_set(node.stmt.exprs));
    }
    std::vector<NodeId> ids(g.size());
    for (NodeId i = 0; i < g.size(); ++i) ids[i] = i;
    all_nodes_ = node_seq(ids);

    globals_.resize(p.globals.size());
    for (std::size_t i = 0; i < p.globals.size(); ++i) {
        const auto& decl = p.globals[i];
        if (decl.init) {
            Evaluator ev(*this, nullptr, 0, nullptr);
            Body init{Statement{Statement::Kind::Return, {}, {}, decl.init, {}, {}, false, decl.loc}};
            globals_[i] = ev.run(init);
        } else {
            globals_[i] = default_value(decl.type);
        }
    }
}

Value Session::eval_traversal(const TraversalDecl& t, NodeId n, std::vector<NodeId>* reads) {
    Evaluator ev(*this, &t, n, reads);
    Value out = ev.run(t.body);
    return t.return_type ? out : Value();
}

bool Session::eval_fixpoint(const FixpointDecl* f, const Value& current, const Value& previous) {
    if (!f) return current == previous;
    Evaluator ev(*this, nullptr, 0, nullptr);
    ev.bind(f->params[0].name, current);
    ev.bind(f->params[1].name, previous);
    Value r = ev.run(f->body);
    if (r.kind() != Value::Kind::Bool) {
        throw DslRuntimeError("fixpoint '" + f->name + "' returned " + std::string(to_string(r.kind())) +
                                  ", expected bool",
                              f->loc);
    }
    return r.as_bool();
}

OutputMap& Session::outputs(const TraversalDecl& t) { return outputs_.at(traversal_index_.at(t.name)); }

const OutputMap& Session::outputs(std::string_view traversal) const {
    auto it = traversal_index_.find(traversal);
    if (it == traversal_index_.end()) throw Error("unknown traversal '" + std::string(traversal) + "'");
    return outputs_[it->second];
}

const Value& Session::global(std::string_view name) const {
    for (std::size_t i = 0; i < p_.globals.size(); ++i)
        if (p_.globals[i].name == name) return globals_[i];
    throw Error("unknown global '" + std::string(name) + "'");
}

} // namespace bcfa::dsl
