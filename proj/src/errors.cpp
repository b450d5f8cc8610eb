#include "bcfa/errors.hpp"

namespace bcfa {

std::string format_loc(const SourceLoc& loc) {
    return std::to_string(loc.line) + ":" + std::to_string(loc.col);
}

ParseError::ParseError(const std::string& what, SourceLoc loc)
    : Error(format_loc(loc) + ": " + what), loc_(loc) {}

DslError::DslError(const std::string& what, SourceLoc loc)
    : Error(format_loc(loc) + ": " + what), loc_(loc) {}

DslRuntimeError::DslRuntimeError(const std::string& what, SourceLoc loc)
    : Error(format_loc(loc) + ": runtime error: " + what), loc_(loc) {}

} // namespace bcfa
