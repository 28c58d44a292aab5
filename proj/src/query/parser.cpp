#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <regex>

#include "fulfil/query/engine.hpp"

namespace fulfil::query {

SyntaxError::SyntaxError(const std::string& message, std::size_t offset, int token_index)
    : std::runtime_error("syntax error at token " + std::to_string(token_index) + " (offset " +
                         std::to_string(offset) + "): " + message),
      offset_(offset),
      token_index_(token_index) {}

namespace {

enum class Tok { Ident, Integer, Decimal, String, Symbol, End };

struct Token {
  Tok kind;
  std::string text;  // identifiers upper-cased in `upper`, raw in `text`
  std::string upper;
  std::size_t offset;
};

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) {
    throw SyntaxError(msg, i, static_cast<int>(toks.size()) + 1);
  };
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(c) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      std::string word(text.substr(start, i - start));
      toks.push_back({Tok::Ident, word, to_upper(word), start});
    } else if (std::isdigit(c) || (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      bool dot = false;
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || (text[i] == '.' && !dot))) {
        if (text[i] == '.') dot = true;
        ++i;
      }
      std::string num(text.substr(start, i - start));
      toks.push_back({dot ? Tok::Decimal : Tok::Integer, num, num, start});
    } else if (c == '\'') {
      std::string s;
      ++i;
      while (true) {
        if (i >= text.size()) fail("unterminated string literal");
        if (text[i] == '\'') {
          if (i + 1 < text.size() && text[i + 1] == '\'') {
            s += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        s += text[i++];
      }
      toks.push_back({Tok::String, s, s, start});
    } else {
      static const char* two[] = {"!=", "<>", ">=", "<="};
      std::string sym;
      for (const char* t : two) {
        if (text.substr(i, 2) == t) sym = t;
      }
      if (sym.empty()) {
        if (std::string_view("(),*;=<>-").find(static_cast<char>(c)) == std::string_view::npos) {
          fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
        }
        sym = std::string(1, static_cast<char>(c));
      }
      i += sym.size();
      toks.push_back({Tok::Symbol, sym, sym, start});
    }
  }
  toks.push_back({Tok::End, "", "", text.size()});
  return toks;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  QueryAst parse() {
    QueryAst ast;
    expect_keyword("SELECT");
    ast.items.push_back(item());
    while (accept_symbol(",")) ast.items.push_back(item());
    expect_keyword("FROM");
    ast.table = identifier("table name");
    if (accept_keyword("WHERE")) {
      ast.where.push_back(condition());
      while (accept_keyword("AND")) ast.where.push_back(condition());
    }
    accept_symbol(";");
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after query");
    return ast;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().offset, static_cast<int>(pos_) + 1);
  }

  bool is_keyword(const char* kw) const { return peek().kind == Tok::Ident && peek().upper == kw; }
  bool accept_keyword(const char* kw) {
    if (!is_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  void expect_keyword(const char* kw) {
    if (!accept_keyword(kw)) {
      fail(std::string("expected ") + kw + (peek().kind == Tok::End ? "" : ", got '" + peek().text + "'"));
    }
  }
  bool accept_symbol(const char* s) {
    if (peek().kind != Tok::Symbol || peek().text != s) return false;
    ++pos_;
    return true;
  }
  void expect_symbol(const char* s) {
    if (!accept_symbol(s)) fail(std::string("expected '") + s + "'");
  }

  static bool reserved(const std::string& upper) {
    static const char* words[] = {"SELECT", "FROM", "WHERE", "AND", "NOW", "INTERVAL", "NULL"};
    return std::any_of(std::begin(words), std::end(words), [&](const char* w) { return upper == w; });
  }

  std::string identifier(const char* what) {
    if (peek().kind != Tok::Ident || reserved(peek().upper)) fail(std::string("expected ") + what);
    return next().text;
  }

  static Aggregate aggregate_of(const std::string& upper) {
    if (upper == "SUM") return Aggregate::Sum;
    if (upper == "AVG") return Aggregate::Avg;
    if (upper == "COUNT") return Aggregate::Count;
    if (upper == "MIN") return Aggregate::Min;
    if (upper == "MAX") return Aggregate::Max;
    if (upper == "STDDEV") return Aggregate::Stddev;
    return Aggregate::None;
  }

  SelectItem item() {
    if (accept_symbol("*")) return {Aggregate::None, "*"};
    if (peek().kind == Tok::Ident && toks_[pos_ + 1].kind == Tok::Symbol && toks_[pos_ + 1].text == "(") {
      Aggregate agg = aggregate_of(peek().upper);
      if (agg == Aggregate::None) fail("unknown function '" + peek().text + "'");
      pos_ += 2;
      SelectItem it{agg, ""};
      if (accept_symbol("*")) {
        if (agg != Aggregate::Count) fail("only COUNT accepts *");
        it.column = "*";
      } else {
        it.column = identifier("column name");
      }
      expect_symbol(")");
      return it;
    }
    return {Aggregate::None, identifier("column or aggregate")};
  }

  CompareOp op() {
    const Token& t = peek();
    if (t.kind == Tok::Symbol) {
      static const std::pair<const char*, CompareOp> ops[] = {
          {"=", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<>", CompareOp::Ne}, {">=", CompareOp::Ge},
          {"<=", CompareOp::Le}, {">", CompareOp::Gt}, {"<", CompareOp::Lt}};
      for (const auto& [s, o] : ops) {
        if (t.text == s) {
          ++pos_;
          return o;
        }
      }
    }
    fail("expected comparison operator");
  }

  std::int64_t integer(const Token& t) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{}) fail("integer out of range");
    return v;
  }

  Condition condition() {
    Condition c;
    c.column = identifier("column name");
    c.op = op();
    if (accept_keyword("NOW")) {
      expect_symbol("(");
      expect_symbol(")");
      NowMinusWeeks expr;
      if (accept_symbol("-")) {
        expect_keyword("INTERVAL");
        expr.weeks = interval();
      }
      c.rhs = expr;
      return c;
    }
    if (peek().kind == Tok::Ident && !reserved(peek().upper)) {
      c.rhs = ColumnRef{next().text};
      return c;
    }
    c.rhs = literal();
    return c;
  }

  // '4 weeks' | 4 WEEK | 4 WEEKS
  std::int64_t interval() {
    const Token& t = peek();
    if (t.kind == Tok::String) {
      static const std::regex re(R"(^\s*(\d+)\s*weeks?\s*$)", std::regex::icase);
      std::smatch m;
      if (!std::regex_match(t.text, m, re)) fail("expected interval like '4 weeks'");
      ++pos_;
      return std::stoll(m[1].str());
    }
    if (t.kind == Tok::Integer) {
      std::int64_t n = integer(next());
      if (!accept_keyword("WEEK") && !accept_keyword("WEEKS")) fail("expected WEEK");
      return n;
    }
    fail("expected interval");
  }

  Value literal() {
    if (accept_keyword("NULL")) return Value{};
    bool negative = accept_symbol("-");
    const Token& t = peek();
    if (t.kind == Tok::Integer) {
      std::int64_t v = integer(next());
      return Value{negative ? -v : v};
    }
    if (t.kind == Tok::Decimal) {
      double v = std::stod(next().text);
      return Value{negative ? -v : v};
    }
    if (negative) fail("expected number after '-'");
    if (t.kind == Tok::String) return Value{next().text};
    fail("expected literal");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

std::string print_literal(const Value& v) {
  if (v.is_null()) return "NULL";
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_decimal()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.as_double());
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  if (v.is_string()) return quote(v.as_string());
  if (v.is_date()) return quote(v.as_date().to_string());
  return "NULL";
}

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(tokenize(text)).parse(); }

std::string to_string(Aggregate a) {
  switch (a) {
    case Aggregate::None:
      return "";
    case Aggregate::Sum:
      return "SUM";
    case Aggregate::Avg:
      return "AVG";
    case Aggregate::Count:
      return "COUNT";
    case Aggregate::Min:
      return "MIN";
    case Aggregate::Max:
      return "MAX";
    case Aggregate::Stddev:
      return "STDDEV";
  }
  return "";
}

std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq:
      return "=";
    case CompareOp::Ne:
      return "!=";
    case CompareOp::Ge:
      return ">=";
    case CompareOp::Le:
      return "<=";
    case CompareOp::Gt:
      return ">";
    case CompareOp::Lt:
      return "<";
  }
  return "=";
}

std::string print(const QueryAst& ast) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < ast.items.size(); ++i) {
    if (i) out += ", ";
    const auto& it = ast.items[i];
    out += it.aggregate == Aggregate::None ? it.column : to_string(it.aggregate) + "(" + it.column + ")";
  }
  out += " FROM " + ast.table;
  for (std::size_t i = 0; i < ast.where.size(); ++i) {
    const auto& c = ast.where[i];
    out += i ? " AND " : " WHERE ";
    out += c.column + " " + to_string(c.op) + " ";
    if (const auto* now = std::get_if<NowMinusWeeks>(&c.rhs)) {
      out += "NOW()";
      if (now->weeks != 0) out += " - INTERVAL '" + std::to_string(now->weeks) + " weeks'";
    } else if (const auto* col = std::get_if<ColumnRef>(&c.rhs)) {
      out += col->name;
    } else {
      out += print_literal(std::get<Value>(c.rhs));
    }
  }
  return out;
}

}  // namespace fulfil::query
