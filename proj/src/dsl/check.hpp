#pragma once

#include "bcfa/dsl/ast.hpp"

namespace bcfa::dsl {

// Name resolution, builtin arity, fixpoint shape and collection element types.
// Throws DslError on the first problem found.
void check_program(const DslProgram& p);

} // namespace bcfa::dsl
