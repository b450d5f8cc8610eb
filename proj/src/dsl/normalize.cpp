#include <set>

#include "bcfa/dsl/ast.hpp"

namespace bcfa::dsl {

namespace {

class Normalizer {
public:
    explicit Normalizer(const TraversalDecl& t) {
        for_each_statement(t.body, [&](const Statement& s) {
            if (!s.name.empty()) taken_.insert(s.name);
        });
        for_each_expr(t.body, [&](const Expr& e) {
            if (e.kind == Expr::Kind::Ident) taken_.insert(e.name);
        });
        taken_.insert(t.param);
    }

    Body body(const Body& in) {
        Body out;
        for (const auto& s : in) statement(s, out);
        return out;
    }

private:
    void statement(const Statement& s, Body& out) {
        Statement copy = s;
        switch (s.kind) {
        case Statement::Kind::VarDecl:
        case Statement::Kind::Assign:
        case Statement::Kind::Return:
        case Statement::Kind::ExprStmt:
            if (copy.expr) hoist(*copy.expr, out);
            break;
        case Statement::Kind::If:
            copy.body = body(s.body);
            copy.else_body = body(s.else_body);
            break;
        case Statement::Kind::Foreach:
        case Statement::Kind::Block:
            copy.body = body(s.body);
            break;
        }
        out.push_back(std::move(copy));
    }

    // Rewrites output() arguments of calls into temporaries. Operands of && and ||
    // are left alone: hoisting would evaluate them unconditionally.
    void hoist(Expr& e, Body& out) {
        if (e.kind == Expr::Kind::Binary && (e.name == "&&" || e.name == "||")) return;
        for (auto& a : e.args) hoist(a, out);
        if (e.kind != Expr::Kind::Call || e.name == "output") return;
        for (auto& a : e.args) {
            if (!a.is_call("output")) continue;
            Statement tmp;
            tmp.kind = Statement::Kind::Assign;
            tmp.name = fresh();
            tmp.loc = a.loc;
            tmp.expr = std::move(a);
            Expr ref;
            ref.kind = Expr::Kind::Ident;
            ref.name = tmp.name;
            ref.loc = tmp.loc;
            a = std::move(ref);
            out.push_back(std::move(tmp));
        }
    }

    std::string fresh() {
        while (true) {
            std::string name = "tmp" + std::to_string(counter_++);
            if (taken_.insert(name).second) return name;
        }
    }

    std::set<std::string> taken_;
    std::size_t counter_ = 0;
};

} // namespace

TraversalDecl normalize_three_address(const TraversalDecl& t) {
    TraversalDecl out = t;
    out.body = Normalizer(t).body(t.body);
    return out;
}

} // namespace bcfa::dsl
