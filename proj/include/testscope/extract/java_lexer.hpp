#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "testscope/core/errors.hpp"

namespace testscope::java {

enum class TokenKind { Identifier, Number, String, Char, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 0;

  bool is(std::string_view p) const noexcept {
    return (kind == TokenKind::Punct || kind == TokenKind::Identifier) && text == p;
  }
  bool ident() const noexcept { return kind == TokenKind::Identifier; }
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct LexedSource {
  std::vector<Token> tokens;  // always terminated by an End token
  // Comments appearing before the first token, in order.
  std::vector<std::string> headerComments;
};

/// Tokenizes Java source. `<` and `>` are always single-character tokens so
/// that nested generic arguments close cleanly. Throws ParseError on
/// unterminated literals or comments.
LexedSource lex(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace testscope::java
