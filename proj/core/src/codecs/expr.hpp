#pragma once

#include <memory>
#include <string>
#include <vector>

#include "codecs/lexer.hpp"

namespace scenecode::codecs {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Arg {
  std::string name;  // keyword / object key; empty for positional entries
  ExprPtr value;
};

struct Expr {
  enum class Kind {
    number,
    string,
    name,
    member,  // object.text
    call,    // object(args); text carries a generic argument, e.g. "Renderer"
    make,    // new object(args)
    index,   // object[args[0]]
    list,    // [a, b] or (a, b)
    dict,    // {key: value}
    unary,   // text op, object operand
    binary,  // object text rhs
  };

  Kind kind = Kind::number;
  double number = 0.0;
  std::string text;
  ExprPtr object;
  ExprPtr rhs;
  std::vector<Arg> args;
  int line = 1;
  int column = 1;
};

struct Statement {
  ExprPtr target;  // null for expression statements
  std::string op;  // "=", "+=", "-=", "*=" when target is set
  ExprPtr value;
  int line = 1;
  int column = 1;
};

struct ParseIssue {
  int line = 1;
  int column = 1;
  std::string message;
};

struct Program {
  std::vector<Statement> statements;
  std::vector<ParseIssue> issues;
};

// Flattens a name/member chain into "a.b.c"; returns "" for anything else.
std::string dotted(const Expr& e);

// Root variable of a member/call/index chain, or "" when the chain does not
// start at a plain name.
std::string root_name(const Expr& e);

// Generic statement reader shared by the JavaScript, C# and Python
// recognizers. It never fails: unreadable token runs are skipped up to the
// next statement boundary and reported as issues.
Program parse_program(const LexResult& lexed, LexStyle style);

}  // namespace scenecode::codecs
