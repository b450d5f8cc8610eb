#include "bcfa/selector.hpp"

#include <array>

namespace bcfa {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::Any: return "ANY";
    case Strategy::Inc: return "INC";
    case Strategy::Dec: return "DEC";
    case Strategy::Po: return "PO";
    case Strategy::Rpo: return "RPO";
    case Strategy::Wpo: return "WPO";
    case Strategy::Wrpo: return "WRPO";
    case Strategy::Dfs: return "DFS";
    }
    return "ANY";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
    constexpr std::array all{Strategy::Any, Strategy::Inc, Strategy::Dec,  Strategy::Po,
                             Strategy::Rpo, Strategy::Wpo, Strategy::Wrpo, Strategy::Dfs};
    for (Strategy st : all)
        if (to_string(st) == s) return st;
    return std::nullopt;
}

DecisionOutcome select(const AnalysisProperties& props, Cyclicity c) {
    using dsl::Direction;
    const Direction dir = props.direction;
    if (!props.data_flow_sensitive) return {{Strategy::Any, true, dir}, 11};
    if (dir == Direction::Iterative) {
        throw SelectionError("unsupported combination: ITERATIVE traversal that is data-flow sensitive");
    }
    const bool fwd = dir == Direction::Forward;
    auto leaf = [&](int fwd_path, Strategy fwd_s, Strategy bwd_s, bool single) -> DecisionOutcome {
        return fwd ? DecisionOutcome{{fwd_s, single, dir}, fwd_path}
                   : DecisionOutcome{{bwd_s, single, dir}, fwd_path + 1};
    };
    switch (c) {
    case Cyclicity::Sequential: return leaf(1, Strategy::Inc, Strategy::Dec, true);
    case Cyclicity::BranchOnly: return leaf(3, Strategy::Rpo, Strategy::Po, true);
    case Cyclicity::LoopNoBranch:
    case Cyclicity::LoopWithBranch:
        if (props.loop_sensitive) return leaf(9, Strategy::Wrpo, Strategy::Wpo, false);
        if (c == Cyclicity::LoopWithBranch) return leaf(5, Strategy::Rpo, Strategy::Po, true);
        return leaf(7, Strategy::Inc, Strategy::Dec, true);
    }
    return {{Strategy::Any, true, dir}, 11};
}

} // namespace bcfa
