#include <sstream>

#include "bcfa/dsl/ast.hpp"

namespace bcfa::dsl {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '\t') {
            out += "\\t";
            continue;
        }
        out += c;
    }
    return out + '"';
}

std::string join_args(const std::vector<Expr>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(args[i]);
    }
    return out;
}

class Printer {
public:
    std::string str() const { return os_.str(); }

    void program(const DslProgram& p) {
        for (const auto& g : p.globals) {
            os_ << g.name << ": " << to_string(g.type);
            if (g.init) os_ << " = " << print_expr(*g.init);
            os_ << ";\n";
        }
        for (const auto& t : p.traversals) {
            os_ << t.name << " := traversal(" << t.param << ": Node)";
            if (t.return_type) os_ << ": " << to_string(*t.return_type);
            os_ << " {\n";
            body(t.body, 1);
            os_ << "}\n";
        }
        for (const auto& f : p.fixpoints) {
            os_ << f.name << " := fixp(";
            for (std::size_t i = 0; i < f.params.size(); ++i) {
                if (i) os_ << ", ";
                os_ << to_string(f.params[i].type) << ' ' << f.params[i].name;
            }
            os_ << "): " << to_string(f.return_type) << " {\n";
            body(f.body, 1);
            os_ << "}\n";
        }
        for (const auto& s : p.invocations) {
            os_ << "traverse(" << s.graph << ", " << s.traversal << ", " << to_string(s.direction);
            if (s.fixpoint) os_ << ", " << *s.fixpoint;
            os_ << ");\n";
        }
    }

    void body(const Body& b, int depth) {
        for (const auto& s : b) statement(s, depth);
    }

private:
    void indent(int depth) {
        for (int i = 0; i < depth; ++i) os_ << "    ";
    }

    void statement(const Statement& s, int depth) {
        indent(depth);
        switch (s.kind) {
        case Statement::Kind::VarDecl:
            os_ << to_string(*s.type) << ' ' << s.name;
            if (s.expr) os_ << " = " << print_expr(*s.expr);
            os_ << ";\n";
            break;
        case Statement::Kind::Assign:
            os_ << s.name << " = " << print_expr(*s.expr) << ";\n";
            break;
        case Statement::Kind::If:
            os_ << "if (" << print_expr(*s.expr) << ") {\n";
            body(s.body, depth + 1);
            indent(depth);
            os_ << '}';
            if (s.has_else) {
                os_ << " else {\n";
                body(s.else_body, depth + 1);
                indent(depth);
                os_ << '}';
            }
            os_ << '\n';
            break;
        case Statement::Kind::Foreach:
            os_ << "foreach (" << s.name << " : " << print_expr(*s.expr) << ") {\n";
            body(s.body, depth + 1);
            indent(depth);
            os_ << "}\n";
            break;
        case Statement::Kind::Return:
            os_ << "return";
            if (s.expr) os_ << ' ' << print_expr(*s.expr);
            os_ << ";\n";
            break;
        case Statement::Kind::ExprStmt:
            os_ << print_expr(*s.expr) << ";\n";
            break;
        case Statement::Kind::Block:
            os_ << "{\n";
            body(s.body, depth + 1);
            indent(depth);
            os_ << "}\n";
            break;
        }
    }

    std::ostringstream os_;
};

} // namespace

std::string print_expr(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::IntLit: return std::to_string(e.int_value);
    case Expr::Kind::BoolLit: return e.bool_value ? "true" : "false";
    case Expr::Kind::StrLit: return quote(e.name);
    case Expr::Kind::Null: return "null";
    case Expr::Kind::Ident: return e.name;
    case Expr::Kind::Field: return print_expr(e.args[0]) + "." + e.name;
    case Expr::Kind::Call: return e.name + "(" + join_args(e.args) + ")";
    case Expr::Kind::SetLit: return "{" + join_args(e.args) + "}";
    case Expr::Kind::Unary: return "(" + e.name + print_expr(e.args[0]) + ")";
    case Expr::Kind::Binary: return "(" + print_expr(e.args[0]) + " " + e.name + " " + print_expr(e.args[1]) + ")";
    }
    return "null";
}

std::string print_program(const DslProgram& p) {
    Printer pr;
    pr.program(p);
    return pr.str();
}

} // namespace bcfa::dsl
