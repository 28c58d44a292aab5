#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

#include "dsl/internal.hpp"
#include "fulfil/dsl/dsl.hpp"

namespace fulfil::dsl {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      detail_(message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Name, Int, Float, String, Op, Newline, Indent, Dedent, End };

struct Segment {
  std::string text;
  bool hole = false;
  int line = 0;
  int column = 0;
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
  bool fstring = false;
  std::vector<Segment> segments;  // String tokens
};

const std::map<std::string, std::map<std::string, bool>>& host_objects() {
  // object -> member -> is a method (must be called)
  static const std::map<std::string, std::map<std::string, bool>> objects = {
      {"model", {{"optimize", true}, {"reset", true}, {"feasible", false}, {"objVal", false}}},
      {"plan", {{"update", true}}},
      {"logger", {{"log", true}}},
      {"demand", {{"add_constraint", true}}},
      {"supply", {{"add_constraint", true}}},
      {"shipping", {{"add_constraint", true}}},
  };
  return objects;
}

bool is_function(const std::string& name) { return name == "retrieve" || name == "len"; }
bool is_host(const std::string& name) { return host_objects().count(name) || is_function(name); }

bool is_keyword(const std::string& w) {
  static const char* words[] = {"if", "elif", "else", "for", "in", "and", "or", "not", "True", "False", "None", "pass"};
  return std::any_of(std::begin(words), std::end(words), [&](const char* k) { return w == k; });
}

bool is_unsupported(const std::string& w) {
  static const char* words[] = {"import", "from",   "def",    "class", "while",  "lambda", "return",
                                "with",   "try",    "except", "raise", "global", "nonlocal", "del",
                                "yield",  "async",  "await",  "assert", "break", "continue", "is",
                                "finally", "as"};
  return std::any_of(std::begin(words), std::end(words), [&](const char* k) { return w == k; });
}

class Lexer {
 public:
  Lexer(std::string_view src, int line, int column) : src_(src), line_(line), col_(column) {}

  std::vector<Token> run(bool expression_only) {
    bool line_start = !expression_only;
    while (pos_ < src_.size()) {
      if (line_start && depth_ == 0) {
        line_start = false;
        if (indentation()) continue;
      }
      char c = src_[pos_];
      if (c == '\n') {
        if (depth_ == 0 && !expression_only) {
          if (!toks_.empty() && toks_.back().kind != Tok::Newline) push(Tok::Newline, "", line_, col_);
          line_start = true;
        }
        advance();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        advance();
        advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        word();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        number();
        continue;
      }
      if (c == '"' || c == '\'') {
        string(false, line_, col_);
        continue;
      }
      op();
    }
    if (depth_ > 0) throw ParseError("unclosed bracket", open_line_, open_col_);
    if (!expression_only) {
      if (!toks_.empty() && toks_.back().kind != Tok::Newline) push(Tok::Newline, "", line_, col_);
      while (indents_.size() > 1) {
        indents_.pop_back();
        push(Tok::Dedent, "", line_, col_);
      }
    }
    push(Tok::End, "", line_, col_);
    return std::move(toks_);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void push(Tok kind, std::string text, int line, int col) { toks_.push_back({kind, std::move(text), line, col, false, {}}); }

  // Returns true if the line was blank or a comment and has been consumed.
  bool indentation() {
    int width = 0;
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) {
      width = src_[pos_] == '\t' ? (width / 8 + 1) * 8 : width + 1;
      advance();
    }
    if (pos_ >= src_.size()) return true;
    char c = src_[pos_];
    if (c == '\n' || c == '#' || c == '\r') {
      while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      if (pos_ < src_.size()) advance();
      return true;
    }
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(Tok::Indent, "", line_, col_);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(Tok::Dedent, "", line_, col_);
      }
      if (width != indents_.back()) throw ParseError("unindent does not match any outer indentation level", line_, col_);
    }
    return false;
  }

  void word() {
    int line = line_, col = col_;
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
    std::string w(src_.substr(start, pos_ - start));
    if ((w == "f" || w == "F") && pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
      string(true, line, col);
      return;
    }
    push(Tok::Name, w, line, col);
  }

  void number() {
    int line = line_, col = col_;
    std::size_t start = pos_;
    bool dot = false;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || (src_[pos_] == '.' && !dot))) {
      if (src_[pos_] == '.') dot = true;
      advance();
    }
    std::string text(src_.substr(start, pos_ - start));
    text.erase(std::remove(text.begin(), text.end(), '_'), text.end());
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      throw ParseError("invalid number literal", line, col);
    }
    push(dot ? Tok::Float : Tok::Int, text, line, col);
  }

  void string(bool fstring, int line, int col) {
    char q = src_[pos_];
    bool triple = src_.substr(pos_, 3) == std::string(3, q);
    for (int i = 0; i < (triple ? 3 : 1); ++i) advance();

    Token tok{Tok::String, "", line, col, fstring, {}};
    Segment lit{"", false, line_, col_};
    auto flush = [&] {
      if (!lit.text.empty()) tok.segments.push_back(lit);
      lit = Segment{"", false, line_, col_};
    };
    while (true) {
      if (pos_ >= src_.size()) throw ParseError("unterminated string literal", line, col);
      char c = src_[pos_];
      if (triple ? src_.substr(pos_, 3) == std::string(3, q) : c == q) {
        for (int i = 0; i < (triple ? 3 : 1); ++i) advance();
        break;
      }
      if (c == '\n' && !triple) throw ParseError("unterminated string literal", line, col);
      if (c == '\\' && pos_ + 1 < src_.size()) {
        char e = src_[pos_ + 1];
        advance();
        advance();
        switch (e) {
          case '\n': break;
          case 'n': lit.text += '\n'; break;
          case 't': lit.text += '\t'; break;
          case '\\': lit.text += '\\'; break;
          case '\'': lit.text += '\''; break;
          case '"': lit.text += '"'; break;
          default:
            lit.text += '\\';
            lit.text += e;
        }
        continue;
      }
      if (fstring && c == '{') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '{') {
          lit.text += '{';
          advance();
          advance();
          continue;
        }
        flush();
        int hl = line_, hc = col_;
        advance();
        Segment hole{"", true, line_, col_};
        char in_quote = 0;
        while (true) {
          if (pos_ >= src_.size() || (!triple && src_[pos_] == '\n')) throw ParseError("unterminated '{' in f-string", hl, hc);
          char h = src_[pos_];
          if (in_quote) {
            if (h == in_quote) in_quote = 0;
          } else if (h == '\'' || h == '"') {
            if (h == q) throw ParseError("quote inside f-string hole", line_, col_);
            in_quote = h;
          } else if (h == '}') {
            break;
          } else if (h == '{') {
            throw ParseError("nested '{' in f-string hole", line_, col_);
          }
          hole.text += h;
          advance();
        }
        advance();
        if (hole.text.find_first_not_of(" \t\n") == std::string::npos) throw ParseError("empty f-string hole", hl, hc);
        tok.segments.push_back(hole);
        lit = Segment{"", false, line_, col_};
        continue;
      }
      if (fstring && c == '}') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '}') {
          lit.text += '}';
          advance();
          advance();
          continue;
        }
        throw ParseError("single '}' in f-string", line_, col_);
      }
      lit.text += c;
      advance();
    }
    flush();
    toks_.push_back(std::move(tok));
  }

  void op() {
    int line = line_, col = col_;
    static const char* two[] = {"==", "!=", "<=", ">=", "//", "+=", "-=", "*="};
    for (const char* t : two) {
      if (src_.substr(pos_, 2) == t) {
        advance();
        advance();
        push(Tok::Op, t, line, col);
        return;
      }
    }
    char c = src_[pos_];
    if (std::string_view("()[],:.=+-*/%<>;").find(c) == std::string_view::npos) {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    if (c == '(' || c == '[') {
      if (depth_++ == 0) {
        open_line_ = line;
        open_col_ = col;
      }
    } else if (c == ')' || c == ']') {
      if (depth_ == 0) throw ParseError(std::string("unmatched '") + c + "'", line, col);
      --depth_;
    }
    advance();
    push(Tok::Op, std::string(1, c), line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_;
  int col_;
  int depth_ = 0;
  int open_line_ = 0;
  int open_col_ = 0;
  std::vector<int> indents_{0};
  std::vector<Token> toks_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Script script() {
    Script s;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Newline) {
        ++pos_;
        continue;
      }
      if (peek().kind == Tok::Indent) fail("unexpected indent");
      statement(s.statements);
    }
    return s;
  }

  ExprPtr lone_expression() {
    ExprPtr e = expression();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' in expression");
    return e;
  }

 private:
  const Token& peek(int ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek()); }
  [[noreturn]] static void fail_at(const std::string& msg, const Token& t) { throw ParseError(msg, t.line, t.column); }

  bool is_op(const char* s, int ahead = 0) const { return peek(ahead).kind == Tok::Op && peek(ahead).text == s; }
  bool is_name(const char* s) const { return peek().kind == Tok::Name && peek().text == s; }
  bool accept_op(const char* s) {
    if (!is_op(s)) return false;
    ++pos_;
    return true;
  }
  void expect_op(const char* s) {
    if (!accept_op(s)) fail(std::string("expected '") + s + "'" + describe_found());
  }
  std::string describe_found() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Newline: return ", found end of line";
      case Tok::End: return ", found end of input";
      case Tok::Indent: return ", found indent";
      case Tok::Dedent: return ", found dedent";
      case Tok::String: return ", found string";
      default: return ", found '" + t.text + "'";
    }
  }
  void keyword_check(const Token& t) const {
    if (is_unsupported(t.text)) fail_at("unsupported construct '" + t.text + "'", t);
  }

  void statement(Block& out) {
    const Token& t = peek();
    if (t.kind == Tok::Name) keyword_check(t);
    if (t.kind == Tok::Name && t.text == "if") {
      out.push_back(if_statement());
      return;
    }
    if (t.kind == Tok::Name && t.text == "for") {
      out.push_back(for_statement());
      return;
    }
    if (t.kind == Tok::Name && (t.text == "elif" || t.text == "else")) fail("'" + t.text + "' without matching 'if'");
    simple_statements(out);
  }

  void simple_statements(Block& out) {
    out.push_back(simple_statement());
    while (accept_op(";")) {
      if (peek().kind == Tok::Newline || peek().kind == Tok::End) break;
      out.push_back(simple_statement());
    }
    if (peek().kind == Tok::End) return;
    if (peek().kind != Tok::Newline) fail("expected end of statement" + describe_found());
    ++pos_;
  }

  Stmt simple_statement() {
    const Token& t = peek();
    Stmt s;
    s.line = t.line;
    s.column = t.column;
    if (t.kind == Tok::Name) keyword_check(t);
    if (t.kind == Tok::Name && t.text == "pass") {
      ++pos_;
      s.kind = Stmt::Kind::Pass;
      return s;
    }
    if (t.kind == Tok::Name && !is_keyword(t.text)) {
      const char* aug = nullptr;
      for (const char* o : {"+=", "-=", "*="})
        if (is_op(o, 1)) aug = o;
      if (is_op("=", 1) || aug) {
        if (is_host(t.text)) fail("cannot assign to host name '" + t.text + "'");
        s.target = t.text;
        pos_ += 2;
        if (aug) {
          s.kind = Stmt::Kind::AugAssign;
          s.op = std::string(1, aug[0]);
        } else {
          s.kind = Stmt::Kind::Assign;
        }
        s.value = expression();
        return s;
      }
    }
    s.kind = Stmt::Kind::Expr;
    s.value = expression();
    if (is_op("=")) fail("invalid assignment target");
    return s;
  }

  Block block() {
    expect_op(":");
    Block body;
    if (peek().kind != Tok::Newline) {
      simple_statements(body);
      return body;
    }
    ++pos_;
    if (peek().kind != Tok::Indent) fail("expected an indented block");
    ++pos_;
    while (peek().kind != Tok::Dedent && peek().kind != Tok::End) statement(body);
    if (peek().kind == Tok::Dedent) ++pos_;
    return body;
  }

  Stmt if_statement() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.line = peek().line;
    s.column = peek().column;
    ++pos_;
    ExprPtr cond = expression();
    s.branches.push_back({cond, block()});
    while (is_name("elif")) {
      ++pos_;
      ExprPtr c = expression();
      s.branches.push_back({c, block()});
    }
    if (is_name("else")) {
      ++pos_;
      s.body = block();
    }
    return s;
  }

  Stmt for_statement() {
    Stmt s;
    s.kind = Stmt::Kind::For;
    s.line = peek().line;
    s.column = peek().column;
    ++pos_;
    const Token& var = peek();
    if (var.kind != Tok::Name || is_keyword(var.text)) fail("expected loop variable");
    keyword_check(var);
    if (is_host(var.text)) fail("cannot assign to host name '" + var.text + "'");
    s.target = next().text;
    if (!is_name("in")) fail("expected 'in'" + describe_found());
    ++pos_;
    s.value = expression();
    s.body = block();
    return s;
  }

  std::shared_ptr<Expr> make(Expr::Kind kind, const Token& at) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->line = at.line;
    e->column = at.column;
    return e;
  }

  ExprPtr expression() { return or_expr(); }

  ExprPtr or_expr() {
    const Token& at = peek();
    ExprPtr first = and_expr();
    if (!is_name("or")) return first;
    auto e = make(Expr::Kind::Or, at);
    e->items.push_back(first);
    while (is_name("or")) {
      ++pos_;
      e->items.push_back(and_expr());
    }
    return e;
  }

  ExprPtr and_expr() {
    const Token& at = peek();
    ExprPtr first = not_expr();
    if (!is_name("and")) return first;
    auto e = make(Expr::Kind::And, at);
    e->items.push_back(first);
    while (is_name("and")) {
      ++pos_;
      e->items.push_back(not_expr());
    }
    return e;
  }

  ExprPtr not_expr() {
    if (is_name("not")) {
      auto e = make(Expr::Kind::Unary, next());
      e->op = "not";
      e->items.push_back(not_expr());
      return e;
    }
    return comparison();
  }

  ExprPtr comparison() {
    const Token& at = peek();
    ExprPtr first = additive();
    static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    auto compare_op = [&]() -> std::string {
      for (const char* o : ops)
        if (is_op(o)) return o;
      if (is_name("in")) return "in";
      if (is_name("not") && peek(1).kind == Tok::Name && peek(1).text == "in") return "not in";
      return "";
    };
    if (compare_op().empty()) return first;
    auto e = make(Expr::Kind::Compare, at);
    e->items.push_back(first);
    for (std::string o = compare_op(); !o.empty(); o = compare_op()) {
      pos_ += o == "not in" ? 2 : 1;
      e->ops.push_back(o);
      e->items.push_back(additive());
    }
    return e;
  }

  ExprPtr binary(ExprPtr lhs, const Token& at, std::string op, ExprPtr rhs) {
    auto e = make(Expr::Kind::Binary, at);
    e->op = std::move(op);
    e->items = {std::move(lhs), std::move(rhs)};
    return e;
  }

  ExprPtr additive() {
    ExprPtr lhs = term();
    while (is_op("+") || is_op("-")) {
      const Token& at = next();
      lhs = binary(lhs, at, at.text, term());
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (is_op("*") || is_op("/") || is_op("//") || is_op("%")) {
      const Token& at = next();
      lhs = binary(lhs, at, at.text, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (is_op("-") || is_op("+")) {
      const Token& at = next();
      auto e = make(Expr::Kind::Unary, at);
      e->op = at.text;
      e->items.push_back(unary());
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = atom();
    while (true) {
      if (is_op("[")) {
        const Token& at = next();
        auto idx = make(Expr::Kind::Index, at);
        idx->items = {e, expression()};
        expect_op("]");
        e = idx;
      } else if (is_op(".")) {
        fail("attribute access is only allowed on host objects");
      } else if (is_op("(")) {
        fail("only host functions can be called");
      } else {
        return e;
      }
    }
  }

  std::vector<Arg> call_args() {
    expect_op("(");
    std::vector<Arg> args;
    bool keyword_seen = false;
    while (!is_op(")")) {
      Arg a;
      if (peek().kind == Tok::Name && is_op("=", 1)) {
        a.keyword = next().text;
        ++pos_;
        for (const auto& prev : args)
          if (prev.keyword == a.keyword) fail("duplicate keyword argument '" + a.keyword + "'");
        keyword_seen = true;
      } else if (keyword_seen) {
        fail("positional argument follows keyword argument");
      }
      a.value = expression();
      args.push_back(std::move(a));
      if (!accept_op(",")) break;
    }
    expect_op(")");
    return args;
  }

  ExprPtr host_reference(const Token& at) {
    const std::string& object = at.text;
    if (is_function(object)) {
      if (!is_op("(")) fail("'" + object + "' must be called");
      auto e = make(Expr::Kind::Call, at);
      e->name = object;
      e->args = call_args();
      return e;
    }
    if (!accept_op(".")) fail("host object '" + object + "' can only be used through its members");
    const Token& member = peek();
    if (member.kind != Tok::Name) fail("expected member name after '" + object + ".'");
    ++pos_;
    const auto& members = host_objects().at(object);
    auto it = members.find(member.text);
    std::string full = object + "." + member.text;
    if (it == members.end()) fail_at("unknown host name '" + full + "'", member);
    if (it->second) {
      if (!is_op("(")) fail("'" + full + "' must be called");
      auto e = make(Expr::Kind::Call, at);
      e->name = full;
      e->args = call_args();
      return e;
    }
    if (is_op("(")) fail("'" + full + "' is an attribute, not a method");
    auto e = make(Expr::Kind::HostAttr, at);
    e->name = full;
    return e;
  }

  ExprPtr string_literal() {
    const Token& at = peek();
    auto e = make(Expr::Kind::FString, at);
    bool any_hole = false;
    while (peek().kind == Tok::String) {
      const Token& t = next();
      for (const auto& seg : t.segments) {
        if (!seg.hole) {
          if (!e->parts.empty() && !e->parts.back().hole) e->parts.back().text += seg.text;
          else e->parts.push_back({seg.text, nullptr});
          continue;
        }
        any_hole = true;
        Lexer lx(seg.text, seg.line, seg.column);
        ExprPtr hole = Parser(lx.run(true)).lone_expression();
        e->parts.push_back({"", hole});
      }
    }
    if (any_hole) return e;
    auto lit = make(Expr::Kind::Literal, at);
    lit->literal = Value{e->parts.empty() ? std::string() : e->parts.front().text};
    return lit;
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        ++pos_;
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{}) fail_at("integer literal out of range", t);
        auto e = make(Expr::Kind::Literal, t);
        e->literal = Value{v};
        return e;
      }
      case Tok::Float: {
        ++pos_;
        auto e = make(Expr::Kind::Literal, t);
        e->literal = Value{std::stod(t.text)};
        return e;
      }
      case Tok::String:
        return string_literal();
      case Tok::Name: {
        keyword_check(t);
        ++pos_;
        if (t.text == "True" || t.text == "False" || t.text == "None") {
          auto e = make(Expr::Kind::Literal, t);
          if (t.text != "None") e->literal = Value{t.text == "True"};
          return e;
        }
        if (is_keyword(t.text)) fail_at("unexpected keyword '" + t.text + "'", t);
        if (is_host(t.text)) return host_reference(t);
        if (is_op("(")) fail_at("unknown function '" + t.text + "'", t);
        if (is_op(".")) fail_at("unknown host name '" + t.text + "." + peek(1).text + "'", t);
        auto e = make(Expr::Kind::Name, t);
        e->name = t.text;
        return e;
      }
      case Tok::Op:
        if (t.text == "(") {
          ++pos_;
          ExprPtr inner = expression();
          expect_op(")");
          return inner;
        }
        if (t.text == "[") {
          ++pos_;
          auto e = make(Expr::Kind::List, t);
          while (!is_op("]")) {
            e->items.push_back(expression());
            if (is_name("for")) fail("list comprehensions are not supported; use a for loop");
            if (!accept_op(",")) break;
          }
          expect_op("]");
          return e;
        }
        break;
      default:
        break;
    }
    fail("expected an expression" + describe_found());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void collect(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Call || e->kind == Expr::Kind::HostAttr) out.insert(e->name);
  for (const auto& i : e->items) collect(i, out);
  for (const auto& a : e->args) collect(a.value, out);
  for (const auto& p : e->parts) collect(p.hole, out);
}

void collect(const Block& block, std::set<std::string>& out) {
  for (const auto& s : block) {
    collect(s.value, out);
    for (const auto& b : s.branches) {
      collect(b.condition, out);
      collect(b.body, out);
    }
    collect(s.body, out);
  }
}

}  // namespace

Script parse_script(std::string_view text) { return Parser(Lexer(text, 1, 1).run(false)).script(); }

ExprPtr parse_hole(std::string_view text, int line, int column) {
  return Parser(Lexer(text, line, column).run(true)).lone_expression();
}

std::set<std::string> host_names(const Script& script) {
  std::set<std::string> out;
  collect(script.statements, out);
  return out;
}

bool mutates(const Script& script) {
  static const std::set<std::string> mutating = {"model.optimize",        "model.reset",           "plan.update",
                                                 "demand.add_constraint", "supply.add_constraint", "shipping.add_constraint"};
  for (const auto& name : host_names(script))
    if (mutating.count(name)) return true;
  return false;
}

}  // namespace fulfil::dsl
