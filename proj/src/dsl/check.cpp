#include "check.hpp"

#include <map>
#include <set>

namespace bcfa::dsl {

namespace {

const std::map<std::string, std::size_t, std::less<>> kBuiltins{
    {"add", 2},   {"addAll", 2}, {"remove", 2},   {"removeAll", 2},    {"union", 2},
    {"output", 2}, {"equals", 2}, {"contains", 2}, {"intersection", 2}, {"size", 1},
};

bool is_mutator(std::string_view name) {
    return name == "add" || name == "addAll" || name == "remove" || name == "removeAll";
}

const std::set<std::string, std::less<>> kPredefined{"g", "node", "exitNodeId", "entryNodeId"};

TypeRef scalar(TypeRef::Kind k) { return TypeRef{k, {}}; }

TypeRef collection(TypeRef::Kind k, std::optional<TypeRef> elem) {
    TypeRef t{k, {}};
    if (elem) t.args.push_back(*elem);
    return t;
}

// A collection type without arguments is a wildcard over its element type.
bool compatible(const TypeRef& a, const TypeRef& b) {
    if (a.kind != b.kind) return false;
    if (a.args.empty() || b.args.empty()) return true;
    return compatible(a.args.front(), b.args.front());
}

std::optional<TypeRef> element_of(const std::optional<TypeRef>& t) {
    if (!t || !t->is_collection() || t->args.empty()) return std::nullopt;
    return t->args.front();
}

class Checker {
public:
    explicit Checker(const DslProgram& p) : p_(p) {}

    void run() {
        std::set<std::string, std::less<>> top;
        auto declare_top = [&](const std::string& name, SourceLoc loc) {
            if (kPredefined.count(name)) throw DslError("'" + name + "' is predefined", loc);
            if (!top.insert(name).second) throw DslError("duplicate name '" + name + "'", loc);
        };
        for (const auto& g : p_.globals) declare_top(g.name, g.loc);
        for (const auto& t : p_.traversals) declare_top(t.name, t.loc);
        for (const auto& f : p_.fixpoints) declare_top(f.name, f.loc);

        for (const auto& g : p_.globals) {
            scope_.clear();
            add_globals();
            if (g.init) {
                auto t = infer(*g.init);
                if (t && !compatible(g.type, *t)) mismatch(to_string(*t), g.name, g.type, g.init->loc);
            }
        }
        for (const auto& t : p_.traversals) traversal(t);
        for (const auto& f : p_.fixpoints) fixpoint(f);

        for (const auto& s : p_.invocations) {
            if (s.graph != "g") throw DslError("traverse expects the graph 'g', got '" + s.graph + "'", s.loc);
            if (!p_.find_traversal(s.traversal)) {
                throw DslError("unknown traversal '" + s.traversal + "' in traverse", s.loc);
            }
            if (s.fixpoint && !p_.find_fixpoint(*s.fixpoint)) {
                throw DslError("unknown fixpoint '" + *s.fixpoint + "' in traverse", s.loc);
            }
        }
    }

private:
    using Scope = std::map<std::string, std::optional<TypeRef>, std::less<>>;

    void add_globals() {
        for (const auto& g : p_.globals) scope_[g.name] = g.type;
    }

    [[noreturn]] static void mismatch(const std::string& got, const std::string& target, const TypeRef& want,
                                      SourceLoc loc) {
        throw DslError("type mismatch: " + got + " assigned to '" + target + "' of type " + to_string(want), loc);
    }

    void traversal(const TraversalDecl& t) {
        scope_.clear();
        add_globals();
        scope_["g"] = std::nullopt;
        scope_["node"] = scalar(TypeRef::Kind::Node);
        scope_["exitNodeId"] = scalar(TypeRef::Kind::Int);
        scope_["entryNodeId"] = scalar(TypeRef::Kind::Int);
        scope_[t.param] = scalar(TypeRef::Kind::Node);
        declare_locals(t.body);
        in_traversal_ = &t;
        in_fixpoint_ = nullptr;
        body(t.body);
    }

    void fixpoint(const FixpointDecl& f) {
        if (f.params.size() != 2) {
            throw DslError("fixpoint '" + f.name + "' must take exactly two parameters (current, previous), got " +
                               std::to_string(f.params.size()),
                           f.loc);
        }
        if (f.return_type.kind != TypeRef::Kind::Bool) {
            throw DslError("fixpoint '" + f.name + "' must return bool, declared " + to_string(f.return_type), f.loc);
        }
        scope_.clear();
        add_globals();
        for (const auto& prm : f.params) scope_[prm.name] = prm.type;
        declare_locals(f.body);
        in_traversal_ = nullptr;
        in_fixpoint_ = &f;
        body(f.body);
    }

    // Locals are function-scoped; a declaration anywhere in the body makes the name known.
    void declare_locals(const Body& b) {
        for_each_statement(b, [&](const Statement& s) {
            if (s.kind == Statement::Kind::VarDecl) {
                scope_[s.name] = s.type;
            } else if (s.kind == Statement::Kind::Assign) {
                scope_.try_emplace(s.name, std::nullopt);
            }
        });
    }

    void body(const Body& b) {
        for (const auto& s : b) statement(s);
    }

    void statement(const Statement& s) {
        switch (s.kind) {
        case Statement::Kind::VarDecl:
            if (s.expr) assign_check(s.name, *s.expr);
            break;
        case Statement::Kind::Assign:
            if (kPredefined.count(s.name) || (in_traversal_ && s.name == in_traversal_->param)) {
                throw DslError("cannot assign to '" + s.name + "'", s.loc);
            }
            assign_check(s.name, *s.expr);
            break;
        case Statement::Kind::If: {
            auto t = infer(*s.expr);
            if (t && t->kind != TypeRef::Kind::Bool) {
                throw DslError("if condition must be bool, got " + to_string(*t), s.expr->loc);
            }
            body(s.body);
            body(s.else_body);
            break;
        }
        case Statement::Kind::Foreach: {
            auto t = infer(*s.expr);
            if (t && !t->is_collection()) {
                throw DslError("foreach needs a Set or Seq, got " + to_string(*t), s.expr->loc);
            }
            auto saved = scope_.find(s.name) != scope_.end() ? std::optional(scope_[s.name]) : std::nullopt;
            scope_[s.name] = element_of(t);
            body(s.body);
            if (saved) scope_[s.name] = *saved;
            else scope_[s.name] = std::nullopt;
            break;
        }
        case Statement::Kind::Return:
            if (in_traversal_) {
                if (s.expr && !in_traversal_->return_type) {
                    throw DslError("traversal '" + in_traversal_->name + "' has no return type but returns a value",
                                   s.loc);
                }
                if (s.expr) {
                    auto t = infer(*s.expr);
                    if (t && !compatible(*in_traversal_->return_type, *t)) {
                        throw DslError("type mismatch: returning " + to_string(*t) + " from traversal of type " +
                                           to_string(*in_traversal_->return_type),
                                       s.expr->loc);
                    }
                }
            } else if (in_fixpoint_) {
                if (!s.expr) throw DslError("fixpoint must return a bool value", s.loc);
                auto t = infer(*s.expr);
                if (t && t->kind != TypeRef::Kind::Bool) {
                    throw DslError("fixpoint must return bool, got " + to_string(*t), s.expr->loc);
                }
            }
            break;
        case Statement::Kind::ExprStmt:
            infer(*s.expr);
            break;
        case Statement::Kind::Block:
            body(s.body);
            break;
        }
    }

    void assign_check(const std::string& name, const Expr& rhs) {
        auto t = infer(rhs);
        auto it = scope_.find(name);
        if (t && it != scope_.end() && it->second && !compatible(*it->second, *t)) {
            mismatch(to_string(*t), name, *it->second, rhs.loc);
        }
    }

    std::optional<TypeRef> infer(const Expr& e) {
        using K = Expr::Kind;
        switch (e.kind) {
        case K::IntLit: return scalar(TypeRef::Kind::Int);
        case K::BoolLit: return scalar(TypeRef::Kind::Bool);
        case K::StrLit: return scalar(TypeRef::Kind::String);
        case K::Null: return std::nullopt;
        case K::Ident: {
            auto it = scope_.find(e.name);
            if (it == scope_.end()) throw DslError("unknown name '" + e.name + "'", e.loc);
            return it->second;
        }
        case K::Field: return field(e);
        case K::Call: return call(e);
        case K::SetLit: {
            std::optional<TypeRef> elem;
            for (const auto& a : e.args) {
                auto t = infer(a);
                if (!t) continue;
                if (elem && !compatible(*elem, *t)) {
                    throw DslError("set literal mixes " + to_string(*elem) + " and " + to_string(*t), a.loc);
                }
                if (!elem) elem = t;
            }
            return collection(TypeRef::Kind::Set, elem);
        }
        case K::Unary: {
            auto t = infer(e.args[0]);
            auto want = e.name == "!" ? TypeRef::Kind::Bool : TypeRef::Kind::Int;
            if (t && t->kind != want) {
                throw DslError("operator '" + e.name + "' cannot apply to " + to_string(*t), e.loc);
            }
            return scalar(want);
        }
        case K::Binary: return binary(e);
        }
        return std::nullopt;
    }

    std::optional<TypeRef> field(const Expr& e) {
        const Expr& obj = e.args[0];
        if (obj.kind == Expr::Kind::Ident && obj.name == "g" && scope_.count("g") && !scope_.at("g")) {
            if (e.name == "nodes") return collection(TypeRef::Kind::Seq, scalar(TypeRef::Kind::Node));
            throw DslError("unknown graph field '" + e.name + "'", e.loc);
        }
        auto t = infer(obj);
        if (!t) return std::nullopt;
        if (t->kind != TypeRef::Kind::Node) {
            throw DslError("field '" + e.name + "' on a value of type " + to_string(*t), e.loc);
        }
        if (e.name == "id") return scalar(TypeRef::Kind::Int);
        if (e.name == "preds" || e.name == "succs") {
            return collection(TypeRef::Kind::Seq, scalar(TypeRef::Kind::Node));
        }
        if (e.name == "defs" || e.name == "uses" || e.name == "exprs") {
            return collection(TypeRef::Kind::Set, scalar(TypeRef::Kind::String));
        }
        if (e.name == "kind" || e.name == "label") return scalar(TypeRef::Kind::String);
        throw DslError("unknown node field '" + e.name + "'", e.loc);
    }

    std::optional<TypeRef> call(const Expr& e) {
        auto it = kBuiltins.find(e.name);
        if (it == kBuiltins.end()) throw DslError("unknown function '" + e.name + "'", e.loc);
        if (e.args.size() != it->second) {
            throw DslError("'" + e.name + "' takes " + std::to_string(it->second) + " arguments, got " +
                               std::to_string(e.args.size()),
                           e.loc);
        }
        if (e.name == "output") {
            const Expr& t = e.args[1];
            if (t.kind != Expr::Kind::Ident || !p_.find_traversal(t.name)) {
                throw DslError("second argument of output must name a traversal", t.loc);
            }
            auto n = infer(e.args[0]);
            if (n && n->kind != TypeRef::Kind::Node) {
                throw DslError("first argument of output must be a Node, got " + to_string(*n), e.args[0].loc);
            }
            return p_.find_traversal(t.name)->return_type;
        }

        std::vector<std::optional<TypeRef>> types;
        for (const auto& a : e.args) types.push_back(infer(a));

        if (is_mutator(e.name)) {
            if (e.args[0].kind != Expr::Kind::Ident) {
                throw DslError("first argument of " + e.name + " must be a variable", e.args[0].loc);
            }
            if (types[0] && !types[0]->is_collection()) {
                throw DslError(e.name + " needs a collection, got " + to_string(*types[0]), e.args[0].loc);
            }
            auto elem = element_of(types[0]);
            bool bulk = e.name == "addAll" || e.name == "removeAll";
            auto other = bulk ? element_of(types[1]) : types[1];
            if (bulk && types[1] && !types[1]->is_collection()) {
                throw DslError(e.name + " needs a collection as second argument, got " + to_string(*types[1]),
                               e.args[1].loc);
            }
            if (elem && other && !compatible(*elem, *other)) {
                throw DslError("type mismatch: " + e.name + " of " + to_string(*other) + " into " +
                                   to_string(*types[0]),
                               e.args[1].loc);
            }
            return std::nullopt;
        }
        if (e.name == "union" || e.name == "intersection") {
            for (std::size_t i = 0; i < 2; ++i) {
                if (types[i] && !types[i]->is_collection()) {
                    throw DslError(e.name + " needs collections, got " + to_string(*types[i]), e.args[i].loc);
                }
            }
            if (types[0] && types[1] && !compatible(*types[0], *types[1])) {
                throw DslError("type mismatch: " + e.name + " of " + to_string(*types[0]) + " and " +
                                   to_string(*types[1]),
                               e.loc);
            }
            return types[0] ? types[0] : types[1];
        }
        if (e.name == "contains") {
            auto elem = element_of(types[0]);
            if (types[0] && !types[0]->is_collection()) {
                throw DslError("contains needs a collection, got " + to_string(*types[0]), e.args[0].loc);
            }
            if (elem && types[1] && !compatible(*elem, *types[1])) {
                throw DslError("type mismatch: contains of " + to_string(*types[1]) + " in " + to_string(*types[0]),
                               e.args[1].loc);
            }
            return scalar(TypeRef::Kind::Bool);
        }
        if (e.name == "size") {
            if (types[0] && !types[0]->is_collection()) {
                throw DslError("size needs a collection, got " + to_string(*types[0]), e.args[0].loc);
            }
            return scalar(TypeRef::Kind::Int);
        }
        return scalar(TypeRef::Kind::Bool); // equals
    }

    std::optional<TypeRef> binary(const Expr& e) {
        auto l = infer(e.args[0]);
        auto r = infer(e.args[1]);
        const std::string& op = e.name;
        auto require = [&](const std::optional<TypeRef>& t, TypeRef::Kind k, const Expr& at) {
            if (t && t->kind != k) {
                throw DslError("operator '" + op + "' cannot apply to " + to_string(*t), at.loc);
            }
        };
        if (op == "&&" || op == "||") {
            require(l, TypeRef::Kind::Bool, e.args[0]);
            require(r, TypeRef::Kind::Bool, e.args[1]);
            return scalar(TypeRef::Kind::Bool);
        }
        if (op == "==" || op == "!=") return scalar(TypeRef::Kind::Bool);
        if (op == "+" && ((l && l->kind == TypeRef::Kind::String) || (r && r->kind == TypeRef::Kind::String))) {
            require(l, TypeRef::Kind::String, e.args[0]);
            require(r, TypeRef::Kind::String, e.args[1]);
            return scalar(TypeRef::Kind::String);
        }
        require(l, TypeRef::Kind::Int, e.args[0]);
        require(r, TypeRef::Kind::Int, e.args[1]);
        if (op == "+" || op == "-") return scalar(TypeRef::Kind::Int);
        return scalar(TypeRef::Kind::Bool);
    }

    const DslProgram& p_;
    Scope scope_;
    const TraversalDecl* in_traversal_ = nullptr;
    const FixpointDecl* in_fixpoint_ = nullptr;
};

} // namespace

void check_program(const DslProgram& p) { Checker(p).run(); }

} // namespace bcfa::dsl
