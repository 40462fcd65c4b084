#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>

#include "escher/value.hpp"

namespace escher {

// Expression trees shared by class invariants and object transformers.
// Invariants use AttributeRef; transformers use OldField, InputRef and
// ConvertCall. Trees are immutable and shared by pointer.

enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, IntDiv };
enum class UnaryOp { Not, Neg };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
  ObjectValue value;  // never a RefVal
};
struct AttributeRef {
  std::string name;
};
// `oldc.<name>`
struct OldField {
  std::string name;
};
// `input <name>`
struct InputRef {
  std::string name;
};
// `convert <ID> (<arg>)`
struct ConvertCall {
  std::string converter;
  ExprPtr arg;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<Literal, AttributeRef, OldField, InputRef, ConvertCall, Unary, Binary> node;
};

ExprPtr make_literal(ObjectValue v);
ExprPtr make_attribute_ref(std::string name);
ExprPtr make_old_field(std::string name);
ExprPtr make_input(std::string name);
ExprPtr make_convert(std::string converter, ExprPtr arg);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);

// Deep structural equality.
bool expr_equal(const Expr& a, const Expr& b);
inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  return expr_equal(*a, *b);
}

// Canonical text with the minimum parentheses needed for the conventional
// precedence: or < and < not < comparisons < + - < * // < unary minus.
std::string render_expr(const Expr& e);

std::string_view binary_op_token(BinaryOp op);

// Names reachable through AttributeRef / OldField / InputRef nodes.
void collect_attribute_refs(const Expr& e, std::set<std::string>& out);
void collect_old_fields(const Expr& e, std::set<std::string>& out);
void collect_inputs(const Expr& e, std::set<std::string>& out);
void collect_converters(const Expr& e, std::set<std::string>& out);

}  // namespace escher
