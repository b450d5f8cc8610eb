#pragma once

#include <optional>
#include <string_view>

#include "bcfa/dsl/ast.hpp"

namespace bcfa {

enum class Strategy { Any, Inc, Dec, Po, Rpo, Wpo, Wrpo, Dfs };

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);

inline bool is_worklist(Strategy s) { return s == Strategy::Wpo || s == Strategy::Wrpo; }

struct ExecutionPlan {
    Strategy strategy = Strategy::Any;
    bool single_pass = false; // no fixpoint checks and no confirmation pass
    dsl::Direction direction = dsl::Direction::Forward;

    friend bool operator==(const ExecutionPlan&, const ExecutionPlan&) = default;
};

} // namespace bcfa
