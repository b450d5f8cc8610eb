#include "bcfa/props.hpp"

#include <algorithm>
#include <map>

namespace bcfa {

using dsl::Expr;
using dsl::Statement;

namespace {

// output(n', t) where t is the traversal itself.
bool is_self_output(const Expr& e, const dsl::TraversalDecl& t) {
    return e.is_call("output") && e.args.size() == 2 && e.args[1].kind == Expr::Kind::Ident &&
           e.args[1].name == t.name;
}

bool names_alias(const Expr& e, const AliasEnv& a) { return e.kind == Expr::Kind::Ident && a.contains(e.name); }

} // namespace

AliasEnv compute_aliases(const dsl::TraversalDecl& t) {
    AliasEnv env;
    env.names = {t.param, "node"};

    // Right-hand sides per assigned variable; a null entry marks a binding that is not
    // a plain identifier copy (foreach variables).
    std::map<std::string, std::vector<const Expr*>> sources;
    dsl::for_each_statement(t.body, [&](const Statement& s) {
        if ((s.kind == Statement::Kind::Assign || s.kind == Statement::Kind::VarDecl) && s.expr) {
            sources[s.name].push_back(&*s.expr);
        } else if (s.kind == Statement::Kind::Foreach) {
            sources[s.name].push_back(nullptr);
        }
    });

    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [name, rhs] : sources) {
            if (env.contains(name)) continue;
            bool all = std::all_of(rhs.begin(), rhs.end(), [&](const Expr* e) { return e && names_alias(*e, env); });
            if (all) {
                env.names.insert(name);
                grew = true;
            }
        }
    }
    return env;
}

bool detect_data_flow_sensitivity(const dsl::TraversalDecl& t, const AliasEnv& aliases) {
    bool sensitive = false;
    dsl::for_each_expr(t.body, [&](const Expr& e) {
        if (is_self_output(e, t) && !names_alias(e.args[0], aliases)) sensitive = true;
    });
    return sensitive;
}

OutputVarSets output_variables(const dsl::TraversalDecl& t, const AliasEnv& aliases) {
    OutputVarSets out;
    dsl::for_each_statement(t.body, [&](const Statement& s) {
        if (s.kind != Statement::Kind::Assign && s.kind != Statement::Kind::VarDecl) return;
        if (!s.expr || !is_self_output(*s.expr, t)) return;
        if (names_alias(s.expr->args[0], aliases)) out.v.insert(s.name);
        else out.vp.insert(s.name);
    });
    return out;
}

bool detect_loop_sensitivity(const dsl::TraversalDecl& t, const AliasEnv& aliases) {
    OutputVarSets vars = output_variables(t, aliases);
    auto in = [](const std::set<std::string>& s, const Expr& e) {
        return e.kind == Expr::Kind::Ident && s.count(e.name) > 0;
    };
    bool expand = false, shrink = false, gen = false, kill = false;
    dsl::for_each_expr(t.body, [&](const Expr& e) {
        if (e.kind != Expr::Kind::Call || e.args.size() != 2) return;
        const Expr& c1 = e.args[0];
        const Expr& c2 = e.args[1];
        bool mixed = (in(vars.v, c1) && in(vars.vp, c2)) || (in(vars.vp, c1) && in(vars.v, c2));
        if (e.name == "union" && mixed) expand = true;
        else if (e.name == "intersection" && mixed) shrink = true;
        else if ((e.name == "add" || e.name == "addAll") && in(vars.v, c1)) gen = true;
        else if ((e.name == "remove" || e.name == "removeAll") && in(vars.v, c1)) kill = true;
    });
    return (expand && gen) || (shrink && kill);
}

PropsReport extract_properties(const dsl::DslProgram& p) {
    auto start = std::chrono::steady_clock::now();
    PropsReport report;
    std::map<std::string, AnalysisProperties> cache;
    for (const auto& inv : p.invocations) {
        auto it = cache.find(inv.traversal);
        if (it == cache.end()) {
            const dsl::TraversalDecl* decl = p.find_traversal(inv.traversal);
            if (!decl) throw Error("unknown traversal '" + inv.traversal + "'");
            dsl::TraversalDecl t = dsl::normalize_three_address(*decl);
            AliasEnv aliases = compute_aliases(t);
            AnalysisProperties props;
            props.data_flow_sensitive = detect_data_flow_sensitivity(t, aliases);
            props.loop_sensitive = props.data_flow_sensitive && detect_loop_sensitivity(t, aliases);
            it = cache.emplace(inv.traversal, props).first;
        }
        AnalysisProperties props = it->second;
        props.direction = inv.direction;
        report.entries.push_back({inv.traversal, props});
    }
    report.static_time =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
    return report;
}

} // namespace bcfa
