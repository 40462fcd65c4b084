#include "escher/expr.hpp"

#include <cmath>
#include <type_traits>

#include "internal/overloaded.hpp"

namespace escher {
namespace {

using detail::Overloaded;

constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecNot = 3;
constexpr int kPrecCompare = 4;
constexpr int kPrecAdd = 5;
constexpr int kPrecMul = 6;
constexpr int kPrecNeg = 7;
constexpr int kPrecAtom = 8;

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kPrecOr;
    case BinaryOp::And: return kPrecAnd;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return kPrecCompare;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kPrecAdd;
    case BinaryOp::Mul:
    case BinaryOp::IntDiv: return kPrecMul;
  }
  return kPrecAtom;
}

bool is_numeric_literal(const Expr& e) {
  const auto* lit = std::get_if<Literal>(&e.node);
  return lit && (std::holds_alternative<IntVal>(lit->value) ||
                 std::holds_alternative<RealVal>(lit->value));
}

bool is_negative_literal(const Expr& e) {
  const auto* lit = std::get_if<Literal>(&e.node);
  if (!lit) return false;
  if (const auto* i = std::get_if<IntVal>(&lit->value)) return i->value < 0;
  if (const auto* r = std::get_if<RealVal>(&lit->value)) return std::signbit(r->value);
  return false;
}

int prec(const Expr& e) {
  return std::visit(
      Overloaded{
          [&](const Literal&) { return is_negative_literal(e) ? kPrecNeg : kPrecAtom; },
          [](const Unary& u) { return u.op == UnaryOp::Not ? kPrecNot : kPrecNeg; },
          [](const Binary& b) { return binary_prec(b.op); },
          [](const auto&) { return kPrecAtom; },
      },
      e.node);
}

std::string paren(std::string s) { return "(" + s + ")"; }

}  // namespace

ExprPtr make_literal(ObjectValue v) {
  return std::make_shared<const Expr>(Expr{Literal{std::move(v)}});
}
ExprPtr make_attribute_ref(std::string name) {
  return std::make_shared<const Expr>(Expr{AttributeRef{std::move(name)}});
}
ExprPtr make_old_field(std::string name) {
  return std::make_shared<const Expr>(Expr{OldField{std::move(name)}});
}
ExprPtr make_input(std::string name) {
  return std::make_shared<const Expr>(Expr{InputRef{std::move(name)}});
}
ExprPtr make_convert(std::string converter, ExprPtr arg) {
  return std::make_shared<const Expr>(Expr{ConvertCall{std::move(converter), std::move(arg)}});
}
ExprPtr make_unary(UnaryOp op, ExprPtr operand) {
  return std::make_shared<const Expr>(Expr{Unary{op, std::move(operand)}});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Literal>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, ConvertCall>) {
          return x.converter == y.converter && expr_equal(x.arg, y.arg);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.op == y.op && expr_equal(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
        } else {
          return x.name == y.name;
        }
      },
      a.node);
}

std::string_view binary_op_token(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return "or";
    case BinaryOp::And: return "and";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "/=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::IntDiv: return "//";
  }
  return "?";
}

std::string render_expr(const Expr& e) {
  return std::visit(
      Overloaded{
          [](const Literal& l) { return render_value(l.value); },
          [](const AttributeRef& r) { return r.name; },
          [](const OldField& f) { return "oldc." + f.name; },
          [](const InputRef& i) { return "input " + i.name; },
          [](const ConvertCall& c) { return "convert " + c.converter + " (" + render_expr(*c.arg) + ")"; },
          [](const Unary& u) {
            std::string inner = render_expr(*u.operand);
            if (u.op == UnaryOp::Not) {
              if (prec(*u.operand) < kPrecNot) inner = paren(inner);
              return "not " + inner;
            }
            // A bare "-5" would read back as a negative literal.
            if (prec(*u.operand) < kPrecAtom || is_numeric_literal(*u.operand)) inner = paren(inner);
            return "-" + inner;
          },
          [](const Binary& b) {
            const int p = binary_prec(b.op);
            std::string lhs = render_expr(*b.lhs);
            std::string rhs = render_expr(*b.rhs);
            const int lp = prec(*b.lhs);
            const int rp = prec(*b.rhs);
            if (lp < p || (p == kPrecCompare && lp == p)) lhs = paren(lhs);
            if (rp <= p) rhs = paren(rhs);
            return lhs + " " + std::string(binary_op_token(b.op)) + " " + rhs;
          },
      },
      e.node);
}

namespace {

template <class F>
void walk(const Expr& e, F&& f) {
  f(e);
  std::visit(Overloaded{
                 [&](const ConvertCall& c) { walk(*c.arg, f); },
                 [&](const Unary& u) { walk(*u.operand, f); },
                 [&](const Binary& b) {
                   walk(*b.lhs, f);
                   walk(*b.rhs, f);
                 },
                 [](const auto&) {},
             },
             e.node);
}

}  // namespace

void collect_attribute_refs(const Expr& e, std::set<std::string>& out) {
  walk(e, [&](const Expr& n) {
    if (const auto* r = std::get_if<AttributeRef>(&n.node)) out.insert(r->name);
  });
}

void collect_old_fields(const Expr& e, std::set<std::string>& out) {
  walk(e, [&](const Expr& n) {
    if (const auto* r = std::get_if<OldField>(&n.node)) out.insert(r->name);
  });
}

void collect_inputs(const Expr& e, std::set<std::string>& out) {
  walk(e, [&](const Expr& n) {
    if (const auto* r = std::get_if<InputRef>(&n.node)) out.insert(r->name);
  });
}

void collect_converters(const Expr& e, std::set<std::string>& out) {
  walk(e, [&](const Expr& n) {
    if (const auto* r = std::get_if<ConvertCall>(&n.node)) out.insert(r->converter);
  });
}

}  // namespace escher
