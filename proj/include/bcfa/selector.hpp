#pragma once

#include "bcfa/cfg.hpp"
#include "bcfa/plan.hpp"
#include "bcfa/props.hpp"

namespace bcfa {

struct DecisionOutcome {
    ExecutionPlan plan;
    int path = 11; // leaf P1..P11 of the decision tree

    friend bool operator==(const DecisionOutcome&, const DecisionOutcome&) = default;
};

/// Throws SelectionError for an ITERATIVE traversal that is data-flow sensitive.
DecisionOutcome select(const AnalysisProperties& props, Cyclicity c);

} // namespace bcfa
