#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace scenecode::codecs {

enum class Tok { ident, number, string, punct, newline, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;  // identifier, punctuation, or decoded string contents
  double number = 0.0;
  int line = 1;
  int column = 1;
};

struct Comment {
  int line = 1;
  std::string text;
};

enum class LexStyle {
  c_like,  // JavaScript / C#: //, /* */ comments; newlines only outside ( and [
  python,  // # comments; newlines only outside ( [ {
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by Tok::end
  std::vector<Comment> comments;
};

LexResult lex(std::string_view source, LexStyle style);

}  // namespace scenecode::codecs
