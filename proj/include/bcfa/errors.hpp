#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bcfa {

struct SourceLoc {
    std::size_t line = 0;
    std::size_t col = 0;

    // Locations never participate in structural AST equality.
    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

std::string format_loc(const SourceLoc& loc);

/// Base for every error the engine reports to a user.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CFG files or DSL sources); carries the position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, SourceLoc loc);
    SourceLoc loc() const { return loc_; }

private:
    SourceLoc loc_;
};

/// A CFG that is syntactically fine but violates a structural invariant.
class CfgError : public Error {
public:
    using Error::Error;
};

/// Static (post-parse) error in a DSL program: duplicate or unknown names, types.
class DslError : public Error {
public:
    DslError(const std::string& what, SourceLoc loc);
    SourceLoc loc() const { return loc_; }

private:
    SourceLoc loc_;
};

/// Error raised while interpreting a traversal or fixpoint body.
class DslRuntimeError : public Error {
public:
    DslRuntimeError(const std::string& what, SourceLoc loc);
    SourceLoc loc() const { return loc_; }

private:
    SourceLoc loc_;
};

/// Pass or visit ceiling exceeded while running a traversal.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// The decision tree has no leaf for the requested property combination.
class SelectionError : public Error {
public:
    using Error::Error;
};

} // namespace bcfa
