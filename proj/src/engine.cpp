#include "bcfa/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <deque>
#include <numeric>

namespace bcfa {

using Clock = std::chrono::steady_clock;

RunMetrics& RunMetrics::operator+=(const RunMetrics& o) {
    visits += o.visits;
    passes += o.passes;
    checks += o.checks;
    pushes += o.pushes;
    wall += o.wall;
    return *this;
}

EngineOptions options_from_env() {
    EngineOptions opts;
    if (const char* env = std::getenv("BCFA_MAX_PASSES")) {
        std::string_view text(env);
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
            throw Error("BCFA_MAX_PASSES must be a positive integer, got '" + std::string(text) + "'");
        }
        opts.max_passes = value;
    }
    return opts;
}

Ordering make_ordering(const Cfg& g, Strategy s) {
    Ordering ids(g.size());
    std::iota(ids.begin(), ids.end(), NodeId{0});
    switch (s) {
    case Strategy::Any:
    case Strategy::Inc: return ids;
    case Strategy::Dec: std::reverse(ids.begin(), ids.end()); return ids;
    case Strategy::Po: return post_order(g);
    case Strategy::Rpo: return reverse_post_order(g);
    case Strategy::Dfs: return dfs_pre_order(g);
    case Strategy::Wpo:
    case Strategy::Wrpo: break;
    }
    throw Error("strategy " + std::string(to_string(s)) + " has no fixed ordering");
}

namespace {

// Per-run bookkeeping shared by both executors: stores a new value and reports
// whether the node counts as changed.
struct Visit {
    dsl::Session& s;
    const dsl::TraversalDecl& t;
    const dsl::FixpointDecl* fp;
    dsl::OutputMap& out;
    std::vector<bool> seen;
    RunMetrics& m;

    Visit(dsl::Session& s_, const dsl::TraversalDecl& t_, const dsl::FixpointDecl* fp_, RunMetrics& m_)
        : s(s_), t(t_), fp(fp_), out(s_.outputs(t_)), seen(s_.graph().size()), m(m_) {}

    bool operator()(NodeId v, bool check, std::vector<NodeId>* reads = nullptr) {
        ++m.visits;
        dsl::Value value = s.eval_traversal(t, v, reads);
        bool changed = true;
        if (check && seen[v]) {
            ++m.checks;
            changed = !s.eval_fixpoint(fp, value, out[v]);
        }
        seen[v] = true;
        out[v] = std::move(value);
        return changed;
    }
};

} // namespace

RunMetrics run_passes(dsl::Session& s, const dsl::TraversalDecl& t, const ExecutionPlan& plan,
                      const dsl::FixpointDecl* fp, const EngineOptions& opts) {
    auto start = Clock::now();
    RunMetrics m;
    const Cfg& g = s.graph();
    Visit visit(s, t, fp, m);

    if (plan.direction == dsl::Direction::Iterative) {
        m.passes = 1;
        for (NodeId v = 0; v < g.size(); ++v) visit(v, false);
        m.wall = Clock::now() - start;
        return m;
    }

    const Ordering order = make_ordering(g, plan.strategy);
    const std::size_t ceiling = opts.ceiling(g.size());
    while (true) {
        if (m.passes >= ceiling) {
            throw DivergenceError("traversal '" + t.name + "' did not converge within " + std::to_string(ceiling) +
                                  " passes on graph '" + g.name() + "'");
        }
        ++m.passes;
        bool changed = false;
        for (NodeId v : order) changed = visit(v, !plan.single_pass) || changed;
        if (plan.single_pass || !changed) break;
    }
    m.wall = Clock::now() - start;
    return m;
}

RunMetrics run_worklist(dsl::Session& s, const dsl::TraversalDecl& t, Strategy strategy, dsl::Direction dir,
                        const dsl::FixpointDecl* fp, const EngineOptions& opts) {
    if (!is_worklist(strategy)) throw Error("run_worklist needs WPO or WRPO");
    if (dir == dsl::Direction::Iterative) return run_passes(s, t, {Strategy::Any, false, dir}, fp, opts);

    auto start = Clock::now();
    RunMetrics m;
    const Cfg& g = s.graph();
    const std::size_t n = g.size();
    Visit visit(s, t, fp, m);

    std::deque<NodeId> queue;
    for (NodeId v : strategy == Strategy::Wpo ? post_order(g) : reverse_post_order(g)) queue.push_back(v);
    std::vector<bool> queued(n, true);
    std::vector<std::vector<NodeId>> last_reads(n);
    const std::uint64_t limit = static_cast<std::uint64_t>(opts.ceiling(n)) * n;

    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        queued[v] = false;
        if (m.visits >= limit) {
            throw DivergenceError("traversal '" + t.name + "' exceeded " + std::to_string(limit) +
                                  " worklist visits on graph '" + g.name() + "'");
        }
        last_reads[v].clear();
        if (!visit(v, true, &last_reads[v])) continue;

        const auto& deps = dir == dsl::Direction::Forward ? g.node(v).succs : g.node(v).preds;
        for (NodeId w : deps) {
            if (queued[w]) continue;
            const auto& r = last_reads[w];
            if (std::find(r.begin(), r.end(), v) == r.end()) continue;
            queue.push_back(w);
            queued[w] = true;
            ++m.pushes;
        }
    }
    m.passes = n ? (m.visits + n - 1) / n : 0;
    m.wall = Clock::now() - start;
    return m;
}

RunMetrics run_traversal(dsl::Session& s, const dsl::TraversalDecl& t, const ExecutionPlan& plan,
                         const dsl::FixpointDecl* fp, const EngineOptions& opts) {
    if (is_worklist(plan.strategy)) {
        if (plan.single_pass) throw Error("a worklist strategy cannot be single pass");
        return run_worklist(s, t, plan.strategy, plan.direction, fp, opts);
    }
    return run_passes(s, t, plan, fp, opts);
}

ExecutionResult execute_analysis(const dsl::DslProgram& p, const Cfg& g, const std::vector<ExecutionPlan>& plans,
                                 const EngineOptions& opts) {
    if (plans.size() != p.invocations.size()) {
        throw Error("expected " + std::to_string(p.invocations.size()) + " plans, got " +
                    std::to_string(plans.size()));
    }
    dsl::Session session(p, g);
    ExecutionResult r;
    for (std::size_t i = 0; i < p.invocations.size(); ++i) {
        const auto& inv = p.invocations[i];
        const dsl::TraversalDecl& t = *p.find_traversal(inv.traversal);
        const dsl::FixpointDecl* fp = inv.fixpoint ? p.find_fixpoint(*inv.fixpoint) : nullptr;
        ExecutionPlan plan = plans[i];
        plan.direction = inv.direction;
        RunMetrics m = run_traversal(session, t, plan, fp, opts);
        r.per_invocation.push_back(m);
        r.total += m;
    }
    for (const auto& t : p.traversals) r.outputs[t.name] = session.outputs(t);
    for (const auto& gd : p.globals) r.globals[gd.name] = session.global(gd.name);
    return r;
}

} // namespace bcfa
