#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bcfa/errors.hpp"

namespace bcfa::dsl {

struct Token {
    enum class Kind { Ident, Int, String, Punct, End };
    Kind kind = Kind::End;
    std::string text; // identifier, digits, punctuation, or the unescaped string body
    SourceLoc loc;
    bool newline_before = false;

    bool is(std::string_view punct) const { return kind == Kind::Punct && text == punct; }
    bool is_ident(std::string_view word) const { return kind == Kind::Ident && text == word; }
};

std::vector<Token> tokenize(std::string_view text);

} // namespace bcfa::dsl
