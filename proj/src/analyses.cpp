#include "bcfa/analyses.hpp"

#include <algorithm>
#include <functional>

namespace bcfa {

namespace {

// Post-dominators, written exactly as the original listing.
constexpr const char* kPdom = R"dsl(		allNodes: Set<int>;
		initT := traversal(n: Node) {
			add(allNodes, n.id);
		}
		domT := traversal(n: Node): Set<int> { 
			Set<int> dom;
			if (output(n, domT) != null) dom = output(n, domT);
			else if (node.id == exitNodeId)	dom = {};
			else	dom = allNodes;
			foreach (s : n.succs) 
				dom = intersection(dom, output(s, domT)) 
			add(dom, n.id); 
			return dom; 
		} 
		fp := fixp(Set<int> curr, Set<int> prev): bool {
			if (equals(curr, prev))	return true;
			return false;
		}
		traverse(g, initT, ITERATIVE);
		traverse(g, domT, BACKWARD, fp); 				
)dsl";

constexpr const char* kDom = R"dsl(allNodes: Set<int>;
initT := traversal(n: Node) {
    add(allNodes, n.id);
}
domT := traversal(n: Node): Set<int> {
    Set<int> dom;
    if (output(n, domT) != null) dom = output(n, domT);
    else if (node.id == entryNodeId) dom = {};
    else dom = allNodes;
    foreach (p : n.preds)
        dom = intersection(dom, output(p, domT));
    add(dom, n.id);
    return dom;
}
fp := fixp(Set<int> curr, Set<int> prev): bool {
    if (equals(curr, prev)) return true;
    return false;
}
traverse(g, initT, ITERATIVE);
traverse(g, domT, FORWARD, fp);
)dsl";

// Reaching definitions; a definition is identified by the id of its node.
constexpr const char* kRd = R"dsl(killT := traversal(n: Node): Set<int> {
    Set<int> kill;
    foreach (m : g.nodes)
        if (m.id != n.id && size(intersection(m.defs, n.defs)) > 0)
            add(kill, m.id);
    return kill;
}
rdT := traversal(n: Node): Set<int> {
    Set<int> rd;
    if (output(n, rdT) != null) rd = output(n, rdT);
    foreach (p : n.preds)
        rd = union(rd, output(p, rdT));
    removeAll(rd, output(n, killT));
    if (size(n.defs) > 0) add(rd, n.id);
    return rd;
}
traverse(g, killT, ITERATIVE);
traverse(g, rdT, FORWARD);
)dsl";

// Live variables at node entry.
constexpr const char* kLv = R"dsl(useT := traversal(n: Node): Set<string> {
    Set<string> used;
    addAll(used, n.uses);
    return used;
}
lvT := traversal(n: Node): Set<string> {
    Set<string> live;
    if (output(n, lvT) != null) live = output(n, lvT);
    foreach (s : n.succs)
        live = union(live, output(s, lvT));
    removeAll(live, n.defs);
    addAll(live, output(n, useT));
    return live;
}
traverse(g, useT, ITERATIVE);
traverse(g, lvT, BACKWARD);
)dsl";

// Available expressions at node exit.
constexpr const char* kAe = R"dsl(allExprs: Set<string>;
killT := traversal(n: Node): Set<string> {
    Set<string> kill;
    addAll(allExprs, n.exprs);
    foreach (m : g.nodes)
        if (size(intersection(m.uses, n.defs)) > 0)
            addAll(kill, m.exprs);
    return kill;
}
aeT := traversal(n: Node): Set<string> {
    Set<string> ae;
    if (output(n, aeT) != null) ae = output(n, aeT);
    else if (node.id == entryNodeId) ae = {};
    else ae = allExprs;
    foreach (p : n.preds)
        ae = intersection(ae, output(p, aeT));
    addAll(ae, n.exprs);
    removeAll(ae, output(n, killT));
    return ae;
}
traverse(g, killT, ITERATIVE);
traverse(g, aeT, FORWARD);
)dsl";

// Very busy expressions at node entry.
constexpr const char* kVbe = R"dsl(allExprs: Set<string>;
killT := traversal(n: Node): Set<string> {
    Set<string> kill;
    addAll(allExprs, n.exprs);
    foreach (m : g.nodes)
        if (size(intersection(m.uses, n.defs)) > 0)
            addAll(kill, m.exprs);
    return kill;
}
vbeT := traversal(n: Node): Set<string> {
    Set<string> vbe;
    if (output(n, vbeT) != null) vbe = output(n, vbeT);
    else if (node.id == exitNodeId) vbe = {};
    else vbe = allExprs;
    foreach (s : n.succs)
        vbe = intersection(vbe, output(s, vbeT));
    removeAll(vbe, output(n, killT));
    addAll(vbe, n.exprs);
    return vbe;
}
stable := fixp(Set<string> curr, Set<string> prev): bool {
    return equals(curr, prev);
}
traverse(g, killT, ITERATIVE);
traverse(g, vbeT, BACKWARD, stable);
)dsl";

// Variables defined or used per statement.
constexpr const char* kUdv = R"dsl(udvT := traversal(n: Node): Set<string> {
    return union(n.defs, n.uses);
}
traverse(g, udvT, ITERATIVE);
)dsl";

// Collects the call labels of every node, in node order, into a global list.
constexpr const char* kCol = R"dsl(calls: Seq<string>;
colT := traversal(n: Node): Seq<string> {
    Seq<string> here;
    foreach (e : n.exprs) {
        add(here, e);
        add(calls, e);
    }
    return here;
}
traverse(g, colT, FORWARD);
)dsl";

AnalysisProperties props(bool flw, bool lp, Direction d) { return {flw, lp, d}; }

std::vector<AnalysisAsset> build_corpus() {
    const auto iter = props(false, false, Direction::Iterative);
    std::vector<AnalysisAsset> corpus{
        {"PDOM", kPdom, {iter, props(true, false, Direction::Backward)}, {}},
        {"DOM", kDom, {iter, props(true, false, Direction::Forward)}, {}},
        {"RD", kRd, {iter, props(true, true, Direction::Forward)}, {}},
        {"LV", kLv, {iter, props(true, true, Direction::Backward)}, {}},
        {"AE", kAe, {iter, props(true, true, Direction::Forward)}, {}},
        {"VBE", kVbe, {iter, props(true, true, Direction::Backward)}, {}},
        {"UDV", kUdv, {iter}, {}},
        {"COL", kCol, {props(false, false, Direction::Forward)}, {}},
    };
    for (auto& a : corpus) {
        a.program = dsl::parse_program(a.source);
        PropsReport r = extract_properties(a.program);
        std::vector<AnalysisProperties> got;
        for (const auto& e : r.entries) got.push_back(e.props);
        if (got != a.expected) throw Error("shipped analysis " + a.name + " does not have its expected properties");
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// Reference solvers: plain round-robin iteration over C++ sets.

template <class T>
using Sets = std::vector<std::set<T>>;

template <class T>
void solve(Sets<T>& x, const std::function<std::set<T>(NodeId)>& f) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId v = 0; v < x.size(); ++v) {
            std::set<T> next = f(v);
            if (next != x[v]) {
                x[v] = std::move(next);
                changed = true;
            }
        }
    }
}

template <class T>
std::set<T> meet(const std::vector<NodeId>& from, const Sets<T>& x, const std::set<T>& top) {
    if (from.empty()) return top;
    std::set<T> out = x[from.front()];
    for (std::size_t i = 1; i < from.size(); ++i) {
        std::set<T> keep;
        std::set_intersection(out.begin(), out.end(), x[from[i]].begin(), x[from[i]].end(),
                              std::inserter(keep, keep.end()));
        out = std::move(keep);
    }
    return out;
}

template <class T>
std::set<T> minus(std::set<T> a, const std::set<T>& b) {
    for (const auto& v : b) a.erase(v);
    return a;
}

bool overlaps(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::any_of(a.begin(), a.end(), [&](const std::string& s) { return b.count(s) > 0; });
}

dsl::OutputMap to_outputs(const Sets<NodeId>& x) {
    dsl::OutputMap out;
    for (const auto& s : x) {
        std::vector<dsl::Value> items;
        for (NodeId v : s) items.push_back(dsl::Value::integer(v));
        out.push_back(dsl::Value::set(std::move(items)));
    }
    return out;
}

dsl::OutputMap to_outputs(const Sets<std::string>& x) {
    dsl::OutputMap out;
    for (const auto& s : x) {
        std::vector<dsl::Value> items;
        for (const auto& v : s) items.push_back(dsl::Value::string(v));
        out.push_back(dsl::Value::set(std::move(items)));
    }
    return out;
}

Sets<NodeId> dominator_sets(const Cfg& g, bool post) {
    const std::size_t n = g.size();
    std::set<NodeId> all;
    for (NodeId v = 0; v < n; ++v) all.insert(v);
    Sets<NodeId> d(n, all);
    auto is_root = [&](NodeId v) { return post ? g.is_exit(v) : v == g.entry(); };
    solve<NodeId>(d, [&](NodeId v) {
        std::set<NodeId> s = is_root(v) ? std::set<NodeId>{} : meet(post ? g.node(v).succs : g.node(v).preds, d, all);
        s.insert(v);
        return s;
    });
    return d;
}

Sets<NodeId> rd_kill(const Cfg& g) {
    Sets<NodeId> kill(g.size());
    for (const auto& n : g.nodes())
        for (const auto& m : g.nodes())
            if (m.id != n.id && overlaps(m.stmt.defs, n.stmt.defs)) kill[n.id].insert(m.id);
    return kill;
}

Sets<std::string> expr_kill(const Cfg& g) {
    Sets<std::string> kill(g.size());
    for (const auto& n : g.nodes())
        for (const auto& m : g.nodes())
            if (overlaps(m.stmt.uses, n.stmt.defs)) kill[n.id].insert(m.stmt.exprs.begin(), m.stmt.exprs.end());
    return kill;
}

std::set<std::string> all_exprs(const Cfg& g) {
    std::set<std::string> out;
    for (const auto& n : g.nodes()) out.insert(n.stmt.exprs.begin(), n.stmt.exprs.end());
    return out;
}

} // namespace

const std::vector<AnalysisAsset>& load_corpus() {
    static const std::vector<AnalysisAsset> corpus = build_corpus();
    return corpus;
}

const AnalysisAsset* find_asset(std::string_view name) {
    for (const auto& a : load_corpus())
        if (a.name == name) return &a;
    return nullptr;
}

std::map<std::string, dsl::OutputMap> reference_solution(const AnalysisAsset& asset, const Cfg& g) {
    const std::size_t n = g.size();
    std::map<std::string, dsl::OutputMap> out;

    if (asset.name == "PDOM" || asset.name == "DOM") {
        out["initT"] = dsl::OutputMap(n);
        out["domT"] = to_outputs(dominator_sets(g, asset.name == "PDOM"));
    } else if (asset.name == "RD") {
        Sets<NodeId> kill = rd_kill(g);
        Sets<NodeId> rd(n);
        solve<NodeId>(rd, [&](NodeId v) {
            std::set<NodeId> in;
            for (NodeId p : g.node(v).preds) in.insert(rd[p].begin(), rd[p].end());
            std::set<NodeId> s = minus(std::move(in), kill[v]);
            if (!g.node(v).stmt.defs.empty()) s.insert(v);
            return s;
        });
        out["killT"] = to_outputs(kill);
        out["rdT"] = to_outputs(rd);
    } else if (asset.name == "LV") {
        Sets<std::string> use(n), live(n);
        for (const auto& node : g.nodes()) use[node.id] = node.stmt.uses;
        solve<std::string>(live, [&](NodeId v) {
            std::set<std::string> o;
            for (NodeId s : g.node(v).succs) o.insert(live[s].begin(), live[s].end());
            std::set<std::string> in = minus(std::move(o), g.node(v).stmt.defs);
            in.insert(use[v].begin(), use[v].end());
            return in;
        });
        out["useT"] = to_outputs(use);
        out["lvT"] = to_outputs(live);
    } else if (asset.name == "AE" || asset.name == "VBE") {
        const bool forward = asset.name == "AE";
        Sets<std::string> kill = expr_kill(g);
        const std::set<std::string> top = all_exprs(g);
        Sets<std::string> x(n, top);
        solve<std::string>(x, [&](NodeId v) {
            const Node& node = g.node(v);
            bool root = forward ? v == g.entry() : g.is_exit(v);
            std::set<std::string> s = root ? std::set<std::string>{} : meet(forward ? node.preds : node.succs, x, top);
            if (forward) {
                s.insert(node.stmt.exprs.begin(), node.stmt.exprs.end());
                return minus(std::move(s), kill[v]);
            }
            s = minus(std::move(s), kill[v]);
            s.insert(node.stmt.exprs.begin(), node.stmt.exprs.end());
            return s;
        });
        out["killT"] = to_outputs(kill);
        out[forward ? "aeT" : "vbeT"] = to_outputs(x);
    } else if (asset.name == "UDV") {
        Sets<std::string> x(n);
        for (const auto& node : g.nodes()) {
            x[node.id] = node.stmt.defs;
            x[node.id].insert(node.stmt.uses.begin(), node.stmt.uses.end());
        }
        out["udvT"] = to_outputs(x);
    } else if (asset.name == "COL") {
        dsl::OutputMap col;
        for (const auto& node : g.nodes()) {
            std::vector<dsl::Value> items;
            for (const auto& e : node.stmt.exprs) items.push_back(dsl::Value::string(e));
            col.push_back(dsl::Value::seq(std::move(items)));
        }
        out["colT"] = std::move(col);
    } else {
        throw Error("no reference solution for analysis '" + asset.name + "'");
    }
    return out;
}

} // namespace bcfa
