#include <algorithm>

#include "bcfa/dsl/ast.hpp"
#include "check.hpp"
#include "lexer.hpp"

namespace bcfa::dsl {

std::string_view to_string(Direction d) {
    switch (d) {
    case Direction::Forward: return "FORWARD";
    case Direction::Backward: return "BACKWARD";
    case Direction::Iterative: return "ITERATIVE";
    }
    return "FORWARD";
}

std::string_view short_name(Direction d) {
    switch (d) {
    case Direction::Forward: return "FWD";
    case Direction::Backward: return "BWD";
    case Direction::Iterative: return "ITER";
    }
    return "FWD";
}

std::string to_string(const TypeRef& t) {
    switch (t.kind) {
    case TypeRef::Kind::Int: return "int";
    case TypeRef::Kind::Bool: return "bool";
    case TypeRef::Kind::String: return "string";
    case TypeRef::Kind::Node: return "Node";
    case TypeRef::Kind::Set:
    case TypeRef::Kind::Seq: {
        std::string out = t.kind == TypeRef::Kind::Set ? "Set<" : "Seq<";
        out += t.args.empty() ? "?" : to_string(t.args.front());
        return out + ">";
    }
    }
    return "int";
}

const TraversalDecl* DslProgram::find_traversal(std::string_view name) const {
    auto it = std::find_if(traversals.begin(), traversals.end(), [&](const auto& t) { return t.name == name; });
    return it == traversals.end() ? nullptr : &*it;
}

const FixpointDecl* DslProgram::find_fixpoint(std::string_view name) const {
    auto it = std::find_if(fixpoints.begin(), fixpoints.end(), [&](const auto& f) { return f.name == name; });
    return it == fixpoints.end() ? nullptr : &*it;
}

namespace {

bool is_type_word(const Token& t) {
    if (t.kind != Token::Kind::Ident) return false;
    return t.text == "int" || t.text == "bool" || t.text == "string" || t.text == "Node" || t.text == "Set" ||
           t.text == "Seq";
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    DslProgram program() {
        DslProgram p;
        while (peek().kind != Token::Kind::End) top_level(p);
        return p;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& what, const Token& at) const {
        std::string got = at.kind == Token::Kind::End ? "end of input" : "'" + at.text + "'";
        throw ParseError(what + ", got " + got, at.loc);
    }

    void expect(std::string_view punct) {
        if (!peek().is(punct)) fail("expected '" + std::string(punct) + "'", peek());
        next();
    }

    std::string ident(std::string_view what = "identifier") {
        if (peek().kind != Token::Kind::Ident) fail("expected " + std::string(what), peek());
        return next().text;
    }

    void keyword(std::string_view word) {
        if (!peek().is_ident(word)) fail("expected '" + std::string(word) + "'", peek());
        next();
    }

    // `;` may be left out when the statement ends a line or a block.
    void terminator() {
        if (peek().is(";")) {
            next();
            return;
        }
        const Token& t = peek();
        if (t.newline_before || t.is("}") || t.is_ident("else") || t.kind == Token::Kind::End) return;
        fail("expected ';'", t);
    }

    TypeRef type() {
        const Token& t = peek();
        if (!is_type_word(t)) fail("expected a type", t);
        next();
        TypeRef out;
        if (t.text == "int") out.kind = TypeRef::Kind::Int;
        else if (t.text == "bool") out.kind = TypeRef::Kind::Bool;
        else if (t.text == "string") out.kind = TypeRef::Kind::String;
        else if (t.text == "Node") out.kind = TypeRef::Kind::Node;
        else {
            out.kind = t.text == "Set" ? TypeRef::Kind::Set : TypeRef::Kind::Seq;
            expect("<");
            out.args.push_back(type());
            expect(">");
        }
        return out;
    }

    void top_level(DslProgram& p) {
        const Token& first = peek();
        SourceLoc loc = first.loc;
        if (first.is_ident("traverse") && peek(1).is("(")) {
            p.invocations.push_back(traverse());
            return;
        }
        if (is_type_word(first)) {
            GlobalDecl g;
            g.loc = loc;
            g.type = type();
            g.name = ident("variable name");
            if (peek().is("=")) {
                next();
                g.init = expr();
            }
            terminator();
            p.globals.push_back(std::move(g));
            return;
        }
        std::string name = ident("declaration");
        if (peek().is(":=")) {
            next();
            if (peek().is_ident("traversal")) {
                next();
                p.traversals.push_back(traversal(std::move(name), loc));
            } else if (peek().is_ident("fixp")) {
                next();
                p.fixpoints.push_back(fixpoint(std::move(name), loc));
            } else {
                fail("expected 'traversal' or 'fixp'", peek());
            }
            return;
        }
        if (peek().is(":")) {
            next();
            GlobalDecl g;
            g.loc = loc;
            g.name = std::move(name);
            g.type = type();
            if (peek().is("=")) {
                next();
                g.init = expr();
            }
            terminator();
            p.globals.push_back(std::move(g));
            return;
        }
        fail("expected ':=' or ':' after '" + name + "'", peek());
    }

    TraverseStmt traverse() {
        TraverseStmt s;
        s.loc = peek().loc;
        keyword("traverse");
        expect("(");
        s.graph = ident("graph name");
        expect(",");
        s.traversal = ident("traversal name");
        expect(",");
        const Token& dir = peek();
        std::string d = ident("direction");
        if (d == "FORWARD") s.direction = Direction::Forward;
        else if (d == "BACKWARD") s.direction = Direction::Backward;
        else if (d == "ITERATIVE") s.direction = Direction::Iterative;
        else fail("expected FORWARD, BACKWARD or ITERATIVE", dir);
        if (peek().is(",")) {
            next();
            s.fixpoint = ident("fixpoint name");
        }
        expect(")");
        terminator();
        return s;
    }

    TraversalDecl traversal(std::string name, SourceLoc loc) {
        TraversalDecl t;
        t.name = std::move(name);
        t.loc = loc;
        expect("(");
        t.param = ident("node parameter");
        expect(":");
        if (!peek().is_ident("Node")) fail("traversal parameter must have type Node", peek());
        next();
        expect(")");
        if (peek().is(":")) {
            next();
            t.return_type = type();
        }
        t.body = block();
        return t;
    }

    FixpointDecl fixpoint(std::string name, SourceLoc loc) {
        FixpointDecl f;
        f.name = std::move(name);
        f.loc = loc;
        expect("(");
        if (!peek().is(")")) {
            while (true) {
                Param prm;
                prm.type = type();
                prm.name = ident("parameter name");
                f.params.push_back(std::move(prm));
                if (!peek().is(",")) break;
                next();
            }
        }
        expect(")");
        expect(":");
        f.return_type = type();
        f.body = block();
        return f;
    }

    Body block() {
        expect("{");
        Body out;
        while (!peek().is("}")) {
            if (peek().kind == Token::Kind::End) fail("expected '}'", peek());
            out.push_back(statement());
        }
        next();
        return out;
    }

    Body branch() {
        if (peek().is("{")) return block();
        Body out;
        out.push_back(statement());
        return out;
    }

    Statement statement() {
        Statement s;
        const Token& t = peek();
        s.loc = t.loc;
        if (t.is("{")) {
            s.kind = Statement::Kind::Block;
            s.body = block();
        } else if (t.is_ident("if")) {
            next();
            s.kind = Statement::Kind::If;
            expect("(");
            s.expr = expr();
            expect(")");
            s.body = branch();
            if (peek().is_ident("else")) {
                next();
                s.has_else = true;
                s.else_body = branch();
            }
        } else if (t.is_ident("foreach")) {
            next();
            s.kind = Statement::Kind::Foreach;
            expect("(");
            s.name = ident("loop variable");
            expect(":");
            s.expr = expr();
            expect(")");
            s.body = branch();
        } else if (t.is_ident("return")) {
            next();
            s.kind = Statement::Kind::Return;
            const Token& after = peek();
            bool bare = after.is(";") || after.is("}") || after.newline_before || after.kind == Token::Kind::End;
            if (!bare) s.expr = expr();
            terminator();
        } else if (is_type_word(t) && (peek(1).kind == Token::Kind::Ident || peek(1).is("<"))) {
            s.kind = Statement::Kind::VarDecl;
            s.type = type();
            s.name = ident("variable name");
            if (peek().is("=")) {
                next();
                s.expr = expr();
            }
            terminator();
        } else if (t.kind == Token::Kind::Ident && peek(1).is("=")) {
            s.kind = Statement::Kind::Assign;
            s.name = next().text;
            next();
            s.expr = expr();
            terminator();
        } else {
            s.kind = Statement::Kind::ExprStmt;
            s.expr = expr();
            terminator();
        }
        return s;
    }

    // Precedence climbing, lowest first.
    Expr expr() { return binary(0); }

    static int precedence(const Token& t) {
        if (t.kind != Token::Kind::Punct) return -1;
        const std::string& op = t.text;
        if (op == "||") return 0;
        if (op == "&&") return 1;
        if (op == "==" || op == "!=") return 2;
        if (op == "<" || op == ">" || op == "<=" || op == ">=") return 3;
        if (op == "+" || op == "-") return 4;
        return -1;
    }

    Expr binary(int min_prec) {
        Expr lhs = unary();
        while (true) {
            int prec = precedence(peek());
            if (prec < min_prec) return lhs;
            const Token& op = next();
            Expr rhs = binary(prec + 1);
            Expr b;
            b.kind = Expr::Kind::Binary;
            b.name = op.text;
            b.loc = op.loc;
            b.args.push_back(std::move(lhs));
            b.args.push_back(std::move(rhs));
            lhs = std::move(b);
        }
    }

    Expr unary() {
        if (peek().is("!") || peek().is("-")) {
            const Token& op = next();
            Expr u;
            u.kind = Expr::Kind::Unary;
            u.name = op.text;
            u.loc = op.loc;
            u.args.push_back(unary());
            return u;
        }
        return postfix();
    }

    Expr postfix() {
        Expr e = primary();
        while (peek().is(".")) {
            next();
            Expr f;
            f.kind = Expr::Kind::Field;
            f.loc = peek().loc;
            f.name = ident("field name");
            f.args.push_back(std::move(e));
            e = std::move(f);
        }
        return e;
    }

    Expr primary() {
        const Token& t = peek();
        Expr e;
        e.loc = t.loc;
        switch (t.kind) {
        case Token::Kind::Int:
            e.kind = Expr::Kind::IntLit;
            e.int_value = std::stoll(next().text);
            return e;
        case Token::Kind::String:
            e.kind = Expr::Kind::StrLit;
            e.name = next().text;
            return e;
        case Token::Kind::Ident:
            if (t.text == "true" || t.text == "false") {
                e.kind = Expr::Kind::BoolLit;
                e.bool_value = next().text == "true";
                return e;
            }
            if (t.text == "null") {
                next();
                e.kind = Expr::Kind::Null;
                return e;
            }
            e.name = next().text;
            if (peek().is("(")) {
                next();
                e.kind = Expr::Kind::Call;
                if (!peek().is(")")) {
                    while (true) {
                        e.args.push_back(expr());
                        if (!peek().is(",")) break;
                        next();
                    }
                }
                expect(")");
            } else {
                e.kind = Expr::Kind::Ident;
            }
            return e;
        case Token::Kind::Punct:
            if (t.is("(")) {
                next();
                Expr inner = expr();
                expect(")");
                return inner;
            }
            if (t.is("{")) {
                next();
                e.kind = Expr::Kind::SetLit;
                if (!peek().is("}")) {
                    while (true) {
                        e.args.push_back(expr());
                        if (!peek().is(",")) break;
                        next();
                    }
                }
                expect("}");
                return e;
            }
            break;
        case Token::Kind::End:
            break;
        }
        fail("expected an expression", t);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

DslProgram parse_program(std::string_view text) {
    Parser parser(tokenize(text));
    DslProgram p = parser.program();
    check_program(p);
    return p;
}

} // namespace bcfa::dsl
