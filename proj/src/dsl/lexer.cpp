#include "lexer.hpp"

#include <array>
#include <cctype>

namespace bcfa::dsl {

namespace {

constexpr std::array<std::string_view, 7> kTwoChar{":=", "==", "!=", "<=", ">=", "&&", "||"};
constexpr std::string_view kOneChar = ":;,(){}<>=.+-!";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t pos = 0, line = 1, col = 1;
    bool newline = true;

    auto advance = [&](std::size_t n) {
        for (std::size_t i = 0; i < n; ++i, ++pos) {
            if (text[pos] == '\n') {
                ++line;
                col = 1;
                newline = true;
            } else {
                ++col;
            }
        }
    };

    while (pos < text.size()) {
        char c = text[pos];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
            while (pos < text.size() && text[pos] != '\n') advance(1);
            continue;
        }

        Token tok;
        tok.loc = {line, col};
        tok.newline_before = newline;
        newline = false;

        if (ident_start(c)) {
            std::size_t end = pos;
            while (end < text.size() && ident_char(text[end])) ++end;
            tok.kind = Token::Kind::Ident;
            tok.text = std::string(text.substr(pos, end - pos));
            advance(end - pos);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos;
            while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
            if (end < text.size() && ident_char(text[end])) {
                throw ParseError("malformed number", tok.loc);
            }
            tok.kind = Token::Kind::Int;
            tok.text = std::string(text.substr(pos, end - pos));
            if (tok.text.size() > 18) throw ParseError("integer literal too large", tok.loc);
            advance(end - pos);
        } else if (c == '"') {
            advance(1);
            tok.kind = Token::Kind::String;
            while (true) {
                if (pos >= text.size() || text[pos] == '\n') throw ParseError("unterminated string", tok.loc);
                char ch = text[pos];
                if (ch == '"') {
                    advance(1);
                    break;
                }
                if (ch == '\\') {
                    if (pos + 1 >= text.size()) throw ParseError("unterminated string", tok.loc);
                    char esc = text[pos + 1];
                    if (esc == 'n') tok.text.push_back('\n');
                    else if (esc == 't') tok.text.push_back('\t');
                    else if (esc == '"' || esc == '\\') tok.text.push_back(esc);
                    else throw ParseError(std::string("unknown escape '\\") + esc + "'", {line, col});
                    advance(2);
                    continue;
                }
                tok.text.push_back(ch);
                advance(1);
            }
        } else {
            tok.kind = Token::Kind::Punct;
            std::string_view rest = text.substr(pos);
            for (auto two : kTwoChar) {
                if (rest.substr(0, 2) == two) {
                    tok.text = std::string(two);
                    break;
                }
            }
            if (tok.text.empty()) {
                if (kOneChar.find(c) == std::string_view::npos) {
                    throw ParseError(std::string("unexpected character '") + c + "'", tok.loc);
                }
                tok.text = std::string(1, c);
            }
            advance(tok.text.size());
        }
        out.push_back(std::move(tok));
    }

    Token end;
    end.loc = {line, col};
    end.newline_before = true;
    out.push_back(end);
    return out;
}

} // namespace bcfa::dsl
