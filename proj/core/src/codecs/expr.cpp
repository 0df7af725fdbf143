#include "codecs/expr.hpp"

#include <algorithm>
#include <array>

namespace scenecode::codecs {

std::string dotted(const Expr& e) {
  if (e.kind == Expr::Kind::name) return e.text;
  if (e.kind == Expr::Kind::member && e.object) {
    std::string base = dotted(*e.object);
    return base.empty() ? std::string() : base + "." + e.text;
  }
  return {};
}

std::string root_name(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::name: return e.text;
    case Expr::Kind::member:
    case Expr::Kind::call:
    case Expr::Kind::index: return e.object ? root_name(*e.object) : std::string();
    default: return {};
  }
}

namespace {

struct Fail {
  std::string message;
};

constexpr int kMaxDepth = 200;

bool one_of(std::string_view s, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

class Parser {
 public:
  Parser(const std::vector<Token>& toks, LexStyle style) : t_(toks), style_(style) {}

  Program run() {
    while (!at_end()) {
      const std::size_t start = pos_;
      depth_ = 0;
      try {
        statement();
      } catch (const Fail& f) {
        const Token& tk = t_[std::min(pos_, t_.size() - 1)];
        prog_.issues.push_back({tk.line, tk.column, f.message});
        resync();
      }
      if (pos_ == start) ++pos_;  // always make progress
    }
    return std::move(prog_);
  }

 private:
  const Token& cur() const { return t_[std::min(pos_, t_.size() - 1)]; }
  const Token& at(std::size_t k) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
  bool at_end() const { return cur().kind == Tok::end; }
  bool is_punct(std::string_view p, std::size_t k = 0) const {
    return at(k).kind == Tok::punct && at(k).text == p;
  }
  bool is_ident(std::string_view s, std::size_t k = 0) const {
    return at(k).kind == Tok::ident && at(k).text == s;
  }
  void expect(std::string_view p) {
    if (!is_punct(p)) throw Fail{"expected '" + std::string(p) + "'"};
    ++pos_;
  }
  bool is_terminator() const {
    return at_end() || cur().kind == Tok::newline || is_punct(";") || is_punct("}");
  }

  void resync() {
    while (!at_end() && cur().kind != Tok::newline && !is_punct(";")) ++pos_;
  }

  void skip_balanced(std::string_view open, std::string_view close) {
    int depth = 0;
    while (!at_end()) {
      if (is_punct(open)) ++depth;
      if (is_punct(close)) {
        --depth;
        if (depth <= 0) {
          ++pos_;
          return;
        }
      }
      ++pos_;
    }
  }

  void skip_line() {
    while (!at_end() && cur().kind != Tok::newline && !is_punct(";")) ++pos_;
  }

  void skip_until_block_open() {
    while (!at_end() && !is_punct("{") && !is_punct(";")) ++pos_;
    if (is_punct("{")) ++pos_;
  }

  // Returns true when a keyword or declaration prefix was consumed.
  bool skip_prefix() {
    if (cur().kind != Tok::ident) return false;
    const std::string& w = cur().text;
    if (style_ == LexStyle::python) {
      if (one_of(w, {"import", "from", "pass", "break", "continue", "global", "nonlocal",
                     "del", "assert", "raise"})) {
        skip_line();
        return true;
      }
      if (one_of(w, {"def", "class", "for", "while", "if", "elif", "else", "with", "try",
                     "except", "finally", "async"})) {
        skip_line();  // header line; the body statements are read on their own
        return true;
      }
      if (one_of(w, {"return", "yield", "await"})) {
        ++pos_;
        return true;
      }
      return false;
    }
    if (one_of(w, {"import", "using", "package", "require"}) && !is_punct("(", 1)) {
      skip_line();
      return true;
    }
    if (one_of(w, {"if", "while", "for", "foreach", "switch", "catch", "lock"})) {
      ++pos_;
      if (is_punct("(")) skip_balanced("(", ")");
      return true;
    }
    if (one_of(w, {"function", "class", "namespace", "interface", "struct", "enum"})) {
      skip_until_block_open();
      return true;
    }
    if (one_of(w, {"const", "let", "var", "export", "default", "async", "await", "public",
                   "private", "protected", "internal", "static", "readonly", "override",
                   "virtual", "void", "final", "return", "yield", "sealed", "partial",
                   "abstract", "extern", "unsafe", "volatile", "else", "try", "finally", "do",
                   "break", "continue", "case"})) {
      ++pos_;
      if (w == "case") skip_line();
      return true;
    }
    // C# typed declarations: Type name = ...; Type<Args> name; Type[] name
    std::size_t k = 1;
    while (is_punct(".", k) && at(k + 1).kind == Tok::ident) k += 2;
    if (is_punct("<", k)) {
      std::size_t j = k + 1;
      int depth = 1;
      while (at(j).kind != Tok::end && depth > 0 && j < k + 16) {
        if (is_punct("<", j)) ++depth;
        if (is_punct(">", j)) --depth;
        ++j;
      }
      if (depth == 0) k = j;
    }
    while (is_punct("[", k) && is_punct("]", k + 1)) k += 2;
    if (at(k).kind == Tok::ident && (is_punct("=", k + 1) || is_punct(";", k + 1)) &&
        !one_of(at(k).text, {"in", "as", "of", "is"})) {
      pos_ += k;
      return true;
    }
    return false;
  }

  void statement() {
    if (cur().kind == Tok::newline || (cur().kind == Tok::punct && cur().text != "(" &&
                                       cur().text != "[" && cur().text != "-" &&
                                       cur().text != "{")) {
      ++pos_;
      return;
    }
    if (is_punct("{")) {  // bare block
      ++pos_;
      return;
    }
    if (skip_prefix()) return;
    const Token& first = cur();
    Statement s;
    s.line = first.line;
    s.column = first.column;
    ExprPtr lhs = expr(0);
    if (cur().kind == Tok::punct && one_of(cur().text, {"=", "+=", "-=", "*=", "/="})) {
      s.op = cur().text;
      ++pos_;
      skip_newlines();
      s.target = lhs;
      s.value = expr(0);
      while (is_punct("=")) {  // a = b = value
        ++pos_;
        s.value = expr(0);
      }
    } else if (is_punct("++") || is_punct("--")) {
      ++pos_;
      return;
    } else {
      s.value = lhs;
    }
    if (!is_terminator() && !is_punct(",")) {
      // Statement continues in a way we cannot model (ternary, comparison, ...).
      throw Fail{"unsupported expression syntax near '" + cur().text + "'"};
    }
    prog_.statements.push_back(std::move(s));
  }

  void skip_newlines() {
    while (cur().kind == Tok::newline) ++pos_;
  }

  static int precedence(const Token& tk) {
    if (tk.kind != Tok::punct) return -1;
    const std::string& p = tk.text;
    if (p == "+" || p == "-") return 1;
    if (p == "*" || p == "/" || p == "%") return 2;
    if (p == "**") return 3;
    return -1;
  }

  std::shared_ptr<Expr> make(Expr::Kind kind, const Token& at_tok) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->line = at_tok.line;
    e->column = at_tok.column;
    return e;
  }

  ExprPtr expr(int min_prec) {
    if (++depth_ > kMaxDepth) throw Fail{"expression nesting too deep"};
    ExprPtr lhs = unary();
    while (true) {
      const int prec = precedence(cur());
      if (prec < 0 || prec < min_prec) break;
      const Token op = cur();
      ++pos_;
      skip_newlines();
      ExprPtr rhs = expr(op.text == "**" ? prec : prec + 1);
      auto b = make(Expr::Kind::binary, op);
      b->text = op.text;
      b->object = lhs;
      b->rhs = rhs;
      lhs = b;
    }
    --depth_;
    return lhs;
  }

  ExprPtr unary() {
    if (is_punct("-") || is_punct("+") || is_punct("!") || is_punct("~") || is_ident("not")) {
      const Token op = cur();
      ++pos_;
      auto u = make(Expr::Kind::unary, op);
      u->text = op.text;
      u->object = unary();
      return u;
    }
    if (is_ident("await") || is_ident("typeof")) ++pos_;
    return postfix(primary());
  }

  std::vector<Arg> args(std::string_view close) {
    std::vector<Arg> out;
    trailing_comma_ = false;
    skip_newlines();
    while (!is_punct(close)) {
      if (at_end()) throw Fail{"unterminated argument list"};
      Arg a;
      if (is_punct("*") || is_punct("**") || is_punct("...")) ++pos_;
      if (cur().kind == Tok::ident && (is_punct("=", 1) || (is_punct(":", 1) && close == ")"))) {
        a.name = cur().text;
        pos_ += 2;
      }
      skip_newlines();
      a.value = expr(0);
      out.push_back(std::move(a));
      skip_newlines();
      if (is_punct(",")) {
        ++pos_;
        skip_newlines();
        trailing_comma_ = is_punct(close);
        continue;
      }
      trailing_comma_ = false;
      if (!is_punct(close)) throw Fail{"expected '" + std::string(close) + "' in argument list"};
    }
    ++pos_;
    return out;
  }

  ExprPtr dict() {
    const Token open = cur();
    ++pos_;
    auto d = make(Expr::Kind::dict, open);
    skip_newlines();
    while (!is_punct("}")) {
      if (at_end()) throw Fail{"unterminated object literal"};
      Arg a;
      if (is_punct("...")) ++pos_;
      const Token key = cur();
      if (key.kind == Tok::ident || key.kind == Tok::string || key.kind == Tok::number) {
        a.name = key.text;
        ++pos_;
      } else {
        throw Fail{"bad object key"};
      }
      skip_newlines();
      if (is_punct(":")) {
        ++pos_;
        skip_newlines();
        a.value = expr(0);
      } else {
        auto n = make(Expr::Kind::name, key);  // {color}
        n->text = key.text;
        a.value = n;
      }
      d->args.push_back(std::move(a));
      skip_newlines();
      if (is_punct(",")) {
        ++pos_;
        skip_newlines();
        continue;
      }
      if (!is_punct("}")) throw Fail{"expected '}' in object literal"};
    }
    ++pos_;
    return d;
  }

  ExprPtr primary() {
    const Token tk = cur();
    switch (tk.kind) {
      case Tok::number: {
        ++pos_;
        auto e = make(Expr::Kind::number, tk);
        e->number = tk.number;
        e->text = tk.text;
        return e;
      }
      case Tok::string: {
        ++pos_;
        auto e = make(Expr::Kind::string, tk);
        e->text = tk.text;
        while (cur().kind == Tok::string) {  // implicit concatenation
          e->text += cur().text;
          ++pos_;
        }
        return e;
      }
      case Tok::ident: {
        if (tk.text == "new") return construction();
        if (tk.text == "function" || tk.text == "lambda") return skip_function();
        ++pos_;
        auto e = make(Expr::Kind::name, tk);
        e->text = tk.text;
        return e;
      }
      case Tok::punct: {
        if (tk.text == "(") {
          ++pos_;
          auto items = args(")");
          if (is_punct("=>")) return skip_arrow_body(tk);
          if (items.size() == 1 && items[0].name.empty() && !trailing_comma_) {
            return items[0].value;
          }
          auto e = make(Expr::Kind::list, tk);
          e->args = std::move(items);
          return e;
        }
        if (tk.text == "[") {
          ++pos_;
          auto e = make(Expr::Kind::list, tk);
          e->args = args("]");
          return e;
        }
        if (tk.text == "{") return dict();
        break;
      }
      default: break;
    }
    throw Fail{"unexpected token '" + tk.text + "'"};
  }

  ExprPtr skip_arrow_body(const Token& at_tok) {
    ++pos_;  // =>
    if (is_punct("{")) {
      skip_balanced("{", "}");
    } else {
      expr(0);
    }
    auto e = make(Expr::Kind::name, at_tok);
    e->text = "<function>";
    return e;
  }

  ExprPtr skip_function() {
    const Token tk = cur();
    if (tk.text == "lambda") {
      while (!at_end() && !is_punct(":")) ++pos_;
      ++pos_;
      expr(0);
    } else {
      while (!at_end() && !is_punct("{")) ++pos_;
      skip_balanced("{", "}");
    }
    auto e = make(Expr::Kind::name, tk);
    e->text = "<function>";
    return e;
  }

  ExprPtr construction() {
    const Token kw = cur();
    ++pos_;
    if (cur().kind != Tok::ident) throw Fail{"expected type after new"};
    ExprPtr callee;
    {
      auto n = make(Expr::Kind::name, cur());
      n->text = cur().text;
      callee = n;
      ++pos_;
    }
    while (is_punct(".") && at(1).kind == Tok::ident) {
      auto m = make(Expr::Kind::member, at(1));
      m->object = callee;
      m->text = at(1).text;
      callee = m;
      pos_ += 2;
    }
    std::string generic = maybe_generic();
    auto e = make(Expr::Kind::make, kw);
    e->object = callee;
    e->text = generic;
    if (is_punct("(")) {
      ++pos_;
      e->args = args(")");
    }
    if (is_punct("{") && style_ == LexStyle::c_like) skip_balanced("{", "}");  // C# initializer
    return e;
  }

  // Consumes "<Type>" before a call when it looks like a generic argument.
  std::string maybe_generic() {
    if (!is_punct("<") || at(1).kind != Tok::ident) return {};
    std::size_t k = 2;
    std::string text = at(1).text;
    while (is_punct(".", k) && at(k + 1).kind == Tok::ident) {
      text += "." + at(k + 1).text;
      k += 2;
    }
    if (!is_punct(">", k)) return {};
    if (!is_punct("(", k + 1) && !is_punct("()", k + 1)) return {};
    pos_ += k + 1;
    return text;
  }

  ExprPtr postfix(ExprPtr e) {
    while (true) {
      if (cur().kind == Tok::newline) {
        std::size_t k = 0;
        while (at(k).kind == Tok::newline) ++k;
        if (!(at(k).kind == Tok::punct && (at(k).text == "." || at(k).text == "?."))) break;
        pos_ += k;
      }
      if ((is_punct(".") || is_punct("?.")) && at(1).kind == Tok::ident) {
        auto m = make(Expr::Kind::member, at(1));
        m->object = e;
        m->text = at(1).text;
        pos_ += 2;
        e = m;
        continue;
      }
      if (is_punct("<") && (e->kind == Expr::Kind::member || e->kind == Expr::Kind::name)) {
        const std::size_t save = pos_;
        std::string generic = maybe_generic();
        if (!generic.empty()) {
          const Token open = cur();
          ++pos_;
          auto c = make(Expr::Kind::call, open);
          c->object = e;
          c->text = generic;
          c->args = args(")");
          e = c;
          continue;
        }
        pos_ = save;
        break;
      }
      if (is_punct("(")) {
        const Token open = cur();
        ++pos_;
        auto c = make(Expr::Kind::call, open);
        c->object = e;
        c->args = args(")");
        e = c;
        continue;
      }
      if (is_punct("[")) {
        const Token open = cur();
        ++pos_;
        auto ix = make(Expr::Kind::index, open);
        ix->object = e;
        ix->args = args("]");
        e = ix;
        continue;
      }
      break;
    }
    return e;
  }

  const std::vector<Token>& t_;
  LexStyle style_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  bool trailing_comma_ = false;
  Program prog_;
};

}  // namespace

Program parse_program(const LexResult& lexed, LexStyle style) {
  return Parser(lexed.tokens, style).run();
}

}  // namespace scenecode::codecs
