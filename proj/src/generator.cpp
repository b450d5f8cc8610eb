#include <algorithm>
#include <array>
#include <random>

#include "bcfa/cfg.hpp"

namespace bcfa {

namespace {

// std::uniform_int_distribution is implementation-defined; keep graphs identical
// across standard libraries by drawing from the raw engine.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t bound) { return static_cast<std::size_t>(engine_() % bound); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    bool chance(unsigned percent) { return below(100) < percent; }

private:
    std::mt19937_64 engine_;
};

struct GenStmt {
    enum class Kind { Simple, If, IfElse, Loop } kind = Kind::Simple;
    std::vector<GenStmt> first;  // then-branch or loop body
    std::vector<GenStmt> second; // else-branch
};

using Block = std::vector<GenStmt>;

struct Shape {
    bool allow_if = false;
    bool allow_loop = false;
};

class StructureGen {
public:
    StructureGen(Rng& rng, Shape shape) : rng_(rng), shape_(shape) {}

    // A block consuming exactly `budget` nodes.
    Block block(std::size_t budget, bool need_if, bool need_loop) {
        Block required;
        if (need_loop) {
            bool if_inside = need_if && (budget < 5 || rng_.chance(50));
            std::size_t reserve = (need_if && !if_inside) ? 2 : 0;
            std::size_t lo = if_inside ? 3 : 2;
            std::size_t cost = rng_.between(lo, budget - reserve);
            GenStmt loop{GenStmt::Kind::Loop, block(cost - 1, if_inside, false), {}};
            required.push_back(std::move(loop));
            budget -= cost;
            need_if = need_if && !if_inside;
        }
        if (need_if) {
            std::size_t cost = rng_.between(2, std::min<std::size_t>(budget, 2 + max_nested()));
            required.push_back(make_if(cost));
            budget -= cost;
        }

        Block out = fill(budget);
        for (auto& stmt : required) {
            auto pos = static_cast<std::ptrdiff_t>(rng_.below(out.size() + 1));
            out.insert(out.begin() + pos, std::move(stmt));
        }
        return out;
    }

private:
    std::size_t max_nested() const { return 12; }

    GenStmt make_if(std::size_t cost) {
        if (cost >= 3 && rng_.chance(50)) {
            std::size_t then_cost = rng_.between(1, cost - 2);
            return {GenStmt::Kind::IfElse, fill(then_cost), fill(cost - 1 - then_cost)};
        }
        return {GenStmt::Kind::If, fill(cost - 1), {}};
    }

    Block fill(std::size_t budget) {
        Block out;
        while (budget > 0) {
            std::size_t cap = std::min<std::size_t>(budget, 1 + max_nested());
            unsigned roll = static_cast<unsigned>(rng_.below(100));
            if (shape_.allow_loop && cap >= 2 && roll < 15) {
                std::size_t cost = rng_.between(2, cap);
                out.push_back({GenStmt::Kind::Loop, fill(cost - 1), {}});
                budget -= cost;
            } else if (shape_.allow_if && cap >= 2 && roll < 40) {
                std::size_t cost = rng_.between(2, cap);
                out.push_back(make_if(cost));
                budget -= cost;
            } else {
                out.push_back({GenStmt::Kind::Simple, {}, {}});
                budget -= 1;
            }
        }
        return out;
    }

    Rng& rng_;
    Shape shape_;
};

constexpr std::array<const char*, 5> kVars{"a", "b", "c", "d", "e"};

// Expression label is a pure function of its variables, so one label never
// stands for two different free-variable sets.
std::string expr_label(const std::set<std::string>& vars) {
    std::string out;
    for (const auto& v : vars) {
        if (!out.empty()) out += '+';
        out += v;
    }
    if (vars.size() == 1) out += "+1";
    return out;
}

class Emitter {
public:
    Emitter(Rng& rng, CfgBuilder& b) : rng_(rng), b_(b) {}

    // Emits `block` with control arriving from `preds`; returns the nodes whose
    // control falls through to whatever follows.
    std::vector<NodeId> emit(const Block& block, std::vector<NodeId> preds) {
        for (const auto& stmt : block) preds = emit(stmt, std::move(preds));
        return preds;
    }

    NodeId node(std::vector<NodeId> const& preds, bool is_condition) {
        NodeId id = b_.add_node(statement(is_condition));
        for (NodeId p : preds) b_.add_edge(p, id);
        return id;
    }

private:
    std::vector<NodeId> emit(const GenStmt& stmt, std::vector<NodeId> preds) {
        switch (stmt.kind) {
        case GenStmt::Kind::Simple:
            return {node(preds, false)};
        case GenStmt::Kind::If: {
            NodeId cond = node(preds, true);
            auto out = emit(stmt.first, {cond});
            out.push_back(cond);
            return out;
        }
        case GenStmt::Kind::IfElse: {
            NodeId cond = node(preds, true);
            auto out = emit(stmt.first, {cond});
            auto other = emit(stmt.second, {cond});
            out.insert(out.end(), other.begin(), other.end());
            return out;
        }
        case GenStmt::Kind::Loop: {
            NodeId header = static_cast<NodeId>(next_id_probe());
            auto body_out = emit(stmt.first, std::move(preds));
            NodeId latch = node(body_out, true);
            b_.add_edge(latch, header);
            return {latch};
        }
        }
        return preds;
    }

    std::size_t next_id_probe() const { return count_; }

    Stmt statement(bool is_condition) {
        ++count_;
        Stmt s;
        if (!is_condition && rng_.chance(70)) s.defs.insert(kVars[rng_.below(kVars.size())]);
        std::size_t nuses = is_condition ? rng_.between(1, 2) : rng_.below(3);
        for (std::size_t i = 0; i < nuses; ++i) s.uses.insert(kVars[rng_.below(kVars.size())]);
        if (!s.uses.empty() && rng_.chance(60)) s.exprs.insert(expr_label(s.uses));
        return s;
    }

public:
    std::size_t count_ = 0;

private:
    Rng& rng_;
    CfgBuilder& b_;
};

} // namespace

std::size_t min_size(Cyclicity c) {
    switch (c) {
    case Cyclicity::Sequential: return 2;
    case Cyclicity::BranchOnly: return 4;
    case Cyclicity::LoopNoBranch: return 4;
    case Cyclicity::LoopWithBranch: return 5;
    }
    return 2;
}

Cfg generate_random_cfg(std::uint64_t seed, std::size_t size, Cyclicity cls) {
    if (size < min_size(cls)) {
        throw CfgError("cannot generate a " + std::string(to_string(cls)) + " graph with " +
                       std::to_string(size) + " nodes (minimum " + std::to_string(min_size(cls)) + ")");
    }
    Rng rng(seed);
    Shape shape{cls == Cyclicity::BranchOnly || cls == Cyclicity::LoopWithBranch, has_loop(cls)};
    StructureGen gen(rng, shape);
    Block body = gen.block(size - 2, shape.allow_if, shape.allow_loop);

    CfgBuilder b("g" + std::to_string(seed) + "_" + std::string(to_string(cls)) + "_" + std::to_string(size));
    Emitter em(rng, b);
    NodeId entry = b.add_node(Stmt{StmtKind::Entry, {}, {}, {}, std::nullopt});
    em.count_ = 1;
    auto tail = em.emit(body, {entry});
    NodeId exit = b.add_node(Stmt{StmtKind::Exit, {}, {}, {}, std::nullopt});
    for (NodeId p : tail) b.add_edge(p, exit);
    return std::move(b).build();
}

} // namespace bcfa
