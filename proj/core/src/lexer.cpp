#include "internal/lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <limits>

namespace escher::detail {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::array<std::string_view, 5> kTwoCharSymbols = {":=", "/=", "<=", ">=", "//"};
constexpr std::string_view kOneCharSymbols = ":,[]().=<>+-*";

constexpr std::array<std::string_view, 13> kSchemaKeywords = {
    "class", "feature", "end", "invariant", "version", "attached", "detachable",
    "and", "or", "not", "Void", "true", "false"};

}  // namespace

void syntax_error(int line, int column, std::string_view expected) {
  throw Error(ErrorCode::SyntaxError,
              {std::to_string(line), std::to_string(column), std::string(expected)});
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

bool is_schema_keyword(std::string_view s) {
  for (auto kw : kSchemaKeywords) {
    if (kw == s) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view src, bool keep_comments, int first_line) {
  std::vector<Token> out;
  int line = first_line;
  std::size_t line_start = 0;
  std::size_t i = 0;
  const std::size_t n = src.size();
  auto col = [&](std::size_t at) { return static_cast<int>(at - line_start) + 1; };

  while (i < n) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col(i);
    if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      std::size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = n;
      if (keep_comments) {
        tok.kind = TokKind::Comment;
        tok.text = std::string(src.substr(i + 2, end - i - 2));
        if (!tok.text.empty() && tok.text.back() == '\r') tok.text.pop_back();
        out.push_back(std::move(tok));
      }
      i = end;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < n && ident_char(src[j])) ++j;
      tok.kind = TokKind::Ident;
      tok.text = std::string(src.substr(i, j - i));
      out.push_back(std::move(tok));
      i = j;
      continue;
    }
    if (digit(c)) {
      std::size_t j = i;
      while (j < n && digit(src[j])) ++j;
      tok.kind = TokKind::Integer;
      if (j + 1 < n && src[j] == '.' && digit(src[j + 1])) {
        tok.kind = TokKind::Real;
        ++j;
        while (j < n && digit(src[j])) ++j;
        if (j < n && (src[j] == 'e' || src[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
          if (k >= n || !digit(src[k])) syntax_error(line, col(k), "exponent digits");
          while (k < n && digit(src[k])) ++k;
          j = k;
        }
      }
      tok.text = std::string(src.substr(i, j - i));
      out.push_back(std::move(tok));
      i = j;
      continue;
    }
    if (c == '"') {
      std::string text;
      std::size_t j = i + 1;
      for (;;) {
        if (j >= n || src[j] == '\n') syntax_error(line, col(j), "closing quote");
        const char d = src[j];
        if (d == '"') break;
        if (d == '\\') {
          if (j + 1 >= n) syntax_error(line, col(j), "escape sequence");
          const char e = src[j + 1];
          if (e == '"') text += '"';
          else if (e == '\\') text += '\\';
          else if (e == 'n') text += '\n';
          else syntax_error(line, col(j), "escape sequence");
          j += 2;
          continue;
        }
        text += d;
        ++j;
      }
      tok.kind = TokKind::String;
      tok.text = std::move(text);
      out.push_back(std::move(tok));
      i = j + 1;
      continue;
    }
    bool matched = false;
    for (auto sym : kTwoCharSymbols) {
      if (src.substr(i, 2) == sym) {
        tok.kind = TokKind::Symbol;
        tok.text = std::string(sym);
        out.push_back(std::move(tok));
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kOneCharSymbols.find(c) != std::string_view::npos) {
      tok.kind = TokKind::Symbol;
      tok.text = std::string(1, c);
      out.push_back(std::move(tok));
      ++i;
      continue;
    }
    syntax_error(line, col(i), "token");
  }
  Token end;
  end.kind = TokKind::End;
  end.line = line;
  end.column = col(i);
  out.push_back(std::move(end));
  return out;
}

TokenCursor::TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != TokKind::End) {
    tokens_.push_back(Token{});
  }
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  const std::size_t at = pos_ + ahead;
  return at < tokens_.size() ? tokens_[at] : tokens_.back();
}

Token TokenCursor::next() {
  Token t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

const Token& TokenCursor::previous() const {
  return pos_ == 0 ? tokens_.front() : tokens_[pos_ - 1];
}

bool TokenCursor::at_symbol(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokKind::Symbol && t.text == s;
}

bool TokenCursor::at_keyword(std::string_view kw, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokKind::Ident && t.text == kw;
}

bool TokenCursor::accept_symbol(std::string_view s) {
  if (!at_symbol(s)) return false;
  next();
  return true;
}

bool TokenCursor::accept_keyword(std::string_view kw) {
  if (!at_keyword(kw)) return false;
  next();
  return true;
}

void TokenCursor::expect_symbol(std::string_view s) {
  if (!accept_symbol(s)) fail(s);
}

void TokenCursor::expect_keyword(std::string_view kw) {
  if (!accept_keyword(kw)) fail(kw);
}

std::int64_t TokenCursor::expect_integer(std::string_view what) {
  const Token& t = peek();
  if (t.kind != TokKind::Integer) fail(what);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc{}) fail(what);
  next();
  return v;
}

void TokenCursor::fail(std::string_view expected) const {
  const Token& t = peek();
  syntax_error(t.line, t.column, expected);
}

namespace {

// Integer literal magnitude; `negative` allows the one extra value of int64.
std::int64_t integer_value(const Token& t, bool negative) {
  std::uint64_t mag = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
  const std::uint64_t limit =
      static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + (negative ? 1 : 0);
  if (ec != std::errc{} || mag > limit) syntax_error(t.line, t.column, "integer in range");
  if (negative) return static_cast<std::int64_t>(0 - mag);
  return static_cast<std::int64_t>(mag);
}

double real_value(const Token& t, bool negative) {
  double d = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
  if (ec != std::errc{}) syntax_error(t.line, t.column, "real in range");
  return negative ? -d : d;
}

class ExprParser {
 public:
  ExprParser(TokenCursor& cursor, ExprMode mode) : cur_(cursor), mode_(mode) {}

  ExprPtr parse() {
    return mode_ == ExprMode::Invariant ? parse_or() : parse_additive();
  }

 private:
  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (cur_.accept_keyword("or")) lhs = make_binary(BinaryOp::Or, lhs, parse_and());
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (cur_.accept_keyword("and")) lhs = make_binary(BinaryOp::And, lhs, parse_not());
    return lhs;
  }

  ExprPtr parse_not() {
    if (cur_.accept_keyword("not")) return make_unary(UnaryOp::Not, parse_not());
    return parse_comparison();
  }

  ExprPtr parse_comparison() {
    ExprPtr lhs = parse_additive();
    static constexpr std::pair<std::string_view, BinaryOp> kOps[] = {
        {"=", BinaryOp::Eq}, {"/=", BinaryOp::Ne}, {"<", BinaryOp::Lt},
        {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}};
    for (auto [tok, op] : kOps) {
      if (cur_.accept_symbol(tok)) return make_binary(op, lhs, parse_additive());
    }
    return lhs;
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    for (;;) {
      if (cur_.accept_symbol("+")) {
        lhs = make_binary(BinaryOp::Add, lhs, parse_multiplicative());
      } else if (cur_.accept_symbol("-")) {
        lhs = make_binary(BinaryOp::Sub, lhs, parse_multiplicative());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (cur_.accept_symbol("*")) {
        lhs = make_binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (cur_.accept_symbol("//")) {
        lhs = make_binary(BinaryOp::IntDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (cur_.at_symbol("-")) {
      const TokKind k = cur_.peek(1).kind;
      cur_.next();
      if (k == TokKind::Integer) return make_literal(IntVal{integer_value(cur_.next(), true)});
      if (k == TokKind::Real) return make_literal(RealVal{real_value(cur_.next(), true)});
      return make_unary(UnaryOp::Neg, parse_unary());
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    const Token& t = cur_.peek();
    if (cur_.accept_symbol("(")) {
      ExprPtr inner = parse();
      cur_.expect_symbol(")");
      return inner;
    }
    switch (t.kind) {
      case TokKind::Integer: return make_literal(IntVal{integer_value(cur_.next(), false)});
      case TokKind::Real: return make_literal(RealVal{real_value(cur_.next(), false)});
      case TokKind::String: return make_literal(StringVal{cur_.next().text});
      case TokKind::Ident: break;
      default: cur_.fail("expression");
    }
    if (cur_.accept_keyword("true")) return make_literal(BoolVal{true});
    if (cur_.accept_keyword("false")) return make_literal(BoolVal{false});
    if (cur_.accept_keyword("Void")) return make_literal(VoidVal{});
    if (mode_ == ExprMode::Transformer) {
      if (cur_.accept_keyword("oldc")) {
        cur_.expect_symbol(".");
        return make_old_field(expect_name());
      }
      if (cur_.accept_keyword("input")) return make_input(expect_name());
      if (cur_.accept_keyword("convert")) {
        std::string id = expect_name();
        cur_.expect_symbol("(");
        ExprPtr arg = parse();
        cur_.expect_symbol(")");
        return make_convert(std::move(id), std::move(arg));
      }
      cur_.fail("expression");
    }
    if (is_schema_keyword(t.text)) cur_.fail("expression");
    return make_attribute_ref(cur_.next().text);
  }

  std::string expect_name() {
    if (cur_.peek().kind != TokKind::Ident) cur_.fail("identifier");
    return cur_.next().text;
  }

  TokenCursor& cur_;
  ExprMode mode_;
};

}  // namespace

ExprPtr parse_expression(TokenCursor& cursor, ExprMode mode) {
  return ExprParser(cursor, mode).parse();
}

ObjectValue parse_value_literal(TokenCursor& cursor) {
  bool negative = false;
  if (cursor.at_symbol("-")) {
    negative = true;
    cursor.next();
  }
  const Token& t = cursor.peek();
  if (t.kind == TokKind::Integer) return IntVal{integer_value(cursor.next(), negative)};
  if (t.kind == TokKind::Real) return RealVal{real_value(cursor.next(), negative)};
  if (negative) cursor.fail("number");
  if (t.kind == TokKind::String) return StringVal{cursor.next().text};
  if (cursor.accept_keyword("true")) return BoolVal{true};
  if (cursor.accept_keyword("false")) return BoolVal{false};
  if (cursor.accept_keyword("Void")) return VoidVal{};
  if (cursor.accept_keyword("ref")) {
    const std::int64_t id = cursor.expect_integer("object id");
    return RefVal{static_cast<std::uint64_t>(id)};
  }
  cursor.fail("value");
}

}  // namespace escher::detail
