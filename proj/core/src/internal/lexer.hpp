#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "escher/error.hpp"
#include "escher/expr.hpp"

namespace escher::detail {

enum class TokKind { Ident, Integer, Real, String, Symbol, Comment, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;  // decoded contents for String, text after "--" for Comment
  int line = 1;
  int column = 1;
};

// Splits DSL text into tokens. Line comments start with "--"; they are
// dropped unless keep_comments is set. Throws Error(SyntaxError).
std::vector<Token> tokenize(std::string_view src, bool keep_comments = false,
                            int first_line = 1);

[[noreturn]] void syntax_error(int line, int column, std::string_view expected);

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  // Last token consumed by next().
  const Token& previous() const;

  bool at_end() const { return peek().kind == TokKind::End; }
  bool at_symbol(std::string_view s, std::size_t ahead = 0) const;
  bool at_keyword(std::string_view kw, std::size_t ahead = 0) const;
  bool accept_symbol(std::string_view s);
  bool accept_keyword(std::string_view kw);
  void expect_symbol(std::string_view s);
  void expect_keyword(std::string_view kw);
  std::int64_t expect_integer(std::string_view what);

  [[noreturn]] void fail(std::string_view expected) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_identifier(std::string_view s);

// Reserved words of the class DSL.
bool is_schema_keyword(std::string_view s);

// Expression grammar shared by invariants and transformers.
enum class ExprMode {
  Invariant,    // boolean connectives and comparisons over bare attribute names
  Transformer,  // arithmetic over oldc.<name>, input <name>, convert ID (e)
};

ExprPtr parse_expression(TokenCursor& cursor, ExprMode mode);

// Parses an object-file / command-line literal: integer, real, boolean,
// string, Void or `ref <id>`. Integers accept a leading '-'.
ObjectValue parse_value_literal(TokenCursor& cursor);

}  // namespace escher::detail
