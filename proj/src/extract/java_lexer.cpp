#include "testscope/extract/java_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace testscope::java {

namespace {

constexpr std::string_view kKeywords[] = {
    "abstract", "assert",     "boolean",   "break",     "byte",      "case",
    "catch",    "char",       "class",     "const",     "continue",  "default",
    "do",       "double",     "else",      "enum",      "extends",   "final",
    "finally",  "float",      "for",       "goto",      "if",        "implements",
    "import",   "instanceof", "int",       "interface", "long",      "native",
    "new",      "package",    "private",   "protected", "public",    "return",
    "short",    "static",     "strictfp",  "super",     "switch",    "synchronized",
    "this",     "throw",      "throws",    "transient", "try",       "void",
    "volatile", "while",      "null"};

// Longest first within each leading character. `<` and `>` stay single.
constexpr std::string_view kMultiPunct[] = {
    "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "+=", "-=", "*=",
    "/=",  "&=", "|=", "^=", "%=", "@",  "(",  ")",  "{",  "}",  "[",  "]",
    ";",   ",",  "."};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), word) != std::end(kKeywords);
}

LexedSource lex(std::string_view src) {
  LexedSource out;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = src.size();
  // Skip a UTF-8 byte order mark.
  if (src.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

  auto push = [&](TokenKind kind, std::string text, int at) {
    out.tokens.push_back(Token{kind, std::move(text), at});
  };

  while (i < n) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = n;
      if (out.tokens.empty()) out.headerComments.emplace_back(src.substr(i, end - i));
      i = end;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError(line, "unterminated comment");
      auto body = src.substr(i, end + 2 - i);
      line += static_cast<int>(std::count(body.begin(), body.end(), '\n'));
      if (out.tokens.empty()) out.headerComments.emplace_back(body);
      i = end + 2;
      continue;
    }
    if (src.substr(i, 3) == "\"\"\"") {
      std::size_t end = src.find("\"\"\"", i + 3);
      if (end == std::string_view::npos) throw ParseError(line, "unterminated text block");
      auto body = src.substr(i, end + 3 - i);
      push(TokenKind::String, std::string(body), line);
      line += static_cast<int>(std::count(body.begin(), body.end(), '\n'));
      i = end + 3;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && src[j] != c) {
        if (src[j] == '\\') ++j;
        if (j < n && src[j] == '\n') throw ParseError(line, "unterminated literal");
        ++j;
      }
      if (j >= n) throw ParseError(line, "unterminated literal");
      push(c == '"' ? TokenKind::String : TokenKind::Char, std::string(src.substr(i, j + 1 - i)),
           line);
      i = j + 1;
      continue;
    }
    if (ident_start(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < n && ident_part(static_cast<unsigned char>(src[j]))) ++j;
      push(TokenKind::Identifier, std::string(src.substr(i, j - i)), line);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < n) {
        char d = src[j];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
          ++j;
        } else if ((d == '+' || d == '-') && (src[j - 1] == 'e' || src[j - 1] == 'E' ||
                                              src[j - 1] == 'p' || src[j - 1] == 'P')) {
          ++j;
        } else {
          break;
        }
      }
      push(TokenKind::Number, std::string(src.substr(i, j - i)), line);
      i = j;
      continue;
    }
    bool matched = false;
    for (auto p : kMultiPunct) {
      if (src.substr(i, p.size()) == p) {
        push(TokenKind::Punct, std::string(p), line);
        i += p.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    push(TokenKind::Punct, std::string(1, c), line);
    ++i;
  }
  push(TokenKind::End, "", line);
  return out;
}

}  // namespace testscope::java
