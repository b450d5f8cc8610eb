#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcfa/errors.hpp"

namespace bcfa::dsl {

struct TypeRef {
    enum class Kind { Int, Bool, String, Node, Set, Seq };
    Kind kind = Kind::Int;
    std::vector<TypeRef> args; // element type of Set/Seq, exactly one

    bool is_collection() const { return kind == Kind::Set || kind == Kind::Seq; }
    friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

std::string to_string(const TypeRef& t);

struct Expr {
    enum class Kind { IntLit, BoolLit, StrLit, Null, Ident, Field, Call, SetLit, Unary, Binary };
    Kind kind = Kind::Null;
    std::string name;          // Ident/Call name, Field name, operator spelling
    std::int64_t int_value = 0;
    bool bool_value = false;
    std::vector<Expr> args;    // Field: [object]; Call: arguments; SetLit: elements; Unary: [x]; Binary: [l, r]
    SourceLoc loc;

    bool is_call(std::string_view callee) const { return kind == Kind::Call && name == callee; }
    friend bool operator==(const Expr&, const Expr&) = default;
};

struct Statement {
    enum class Kind { VarDecl, Assign, If, Foreach, Return, ExprStmt, Block };
    Kind kind = Kind::ExprStmt;
    std::string name;                 // VarDecl/Assign target, Foreach variable
    std::optional<TypeRef> type;      // VarDecl
    std::optional<Expr> expr;         // initializer, RHS, condition, collection, return value, expression
    std::vector<Statement> body;      // If then-branch, Foreach body, Block contents
    std::vector<Statement> else_body; // If else-branch
    bool has_else = false;
    SourceLoc loc;

    friend bool operator==(const Statement&, const Statement&) = default;
};

using Body = std::vector<Statement>;

struct GlobalDecl {
    std::string name;
    TypeRef type;
    std::optional<Expr> init;
    SourceLoc loc;

    friend bool operator==(const GlobalDecl&, const GlobalDecl&) = default;
};

struct TraversalDecl {
    std::string name;
    std::string param;
    std::optional<TypeRef> return_type;
    Body body;
    SourceLoc loc;

    friend bool operator==(const TraversalDecl&, const TraversalDecl&) = default;
};

struct Param {
    TypeRef type;
    std::string name;

    friend bool operator==(const Param&, const Param&) = default;
};

struct FixpointDecl {
    std::string name;
    std::vector<Param> params;
    TypeRef return_type;
    Body body;
    SourceLoc loc;

    friend bool operator==(const FixpointDecl&, const FixpointDecl&) = default;
};

enum class Direction { Forward, Backward, Iterative };

std::string_view to_string(Direction d);       // FORWARD / BACKWARD / ITERATIVE
std::string_view short_name(Direction d);      // FWD / BWD / ITER

struct TraverseStmt {
    std::string graph;
    std::string traversal;
    Direction direction = Direction::Forward;
    std::optional<std::string> fixpoint;
    SourceLoc loc;

    friend bool operator==(const TraverseStmt&, const TraverseStmt&) = default;
};

struct DslProgram {
    std::vector<GlobalDecl> globals;
    std::vector<TraversalDecl> traversals;
    std::vector<FixpointDecl> fixpoints;
    std::vector<TraverseStmt> invocations;

    const TraversalDecl* find_traversal(std::string_view name) const;
    const FixpointDecl* find_fixpoint(std::string_view name) const;

    friend bool operator==(const DslProgram&, const DslProgram&) = default;
};

/// Parses and statically checks a program.
DslProgram parse_program(std::string_view text);

/// Canonical source text; parse_program(print_program(p)) == p.
std::string print_program(const DslProgram& p);
std::string print_expr(const Expr& e);

/// Hoists output() calls nested inside call arguments into `tmpK = output(...)` statements.
TraversalDecl normalize_three_address(const TraversalDecl& t);

/// Calls `fn` on every expression in `body`, children before parents.
template <class Fn>
void for_each_expr(const Expr& e, Fn&& fn) {
    for (const auto& a : e.args) for_each_expr(a, fn);
    fn(e);
}

template <class Fn>
void for_each_expr(const Body& body, Fn&& fn) {
    for (const auto& s : body) {
        if (s.expr) for_each_expr(*s.expr, fn);
        for_each_expr(s.body, fn);
        for_each_expr(s.else_body, fn);
    }
}

template <class Fn>
void for_each_statement(const Body& body, Fn&& fn) {
    for (const auto& s : body) {
        fn(s);
        for_each_statement(s.body, fn);
        for_each_statement(s.else_body, fn);
    }
}

} // namespace bcfa::dsl
