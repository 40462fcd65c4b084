#include "escher/interpreter.hpp"

#include <cmath>
#include <limits>

#include "escher/error.hpp"
#include "internal/overloaded.hpp"

namespace escher {

using detail::Overloaded;

namespace {

// Raised for ill-typed or undefined operations; callers map it onto the
// error of their context (invariant clause or transformer instruction).
struct EvalFailure {
  std::string reason;
};

[[noreturn]] void eval_fail(std::string reason) { throw EvalFailure{std::move(reason)}; }

struct EvalContext {
  const ObjectRecord* record = nullptr;  // AttributeRef and OldField source
  const InputMap* inputs = nullptr;
  const ConverterRegistry* registry = nullptr;
};

const ObjectValue& field_value(const ObjectRecord& r, const std::string& name) {
  const Field* f = r.find(name);
  if (!f) throw Error(ErrorCode::MissingAttribute, {name});
  return f->value;
}

bool as_bool(const ObjectValue& v, std::string_view op) {
  const auto* b = std::get_if<BoolVal>(&v);
  if (!b) eval_fail(std::string(op) + " needs boolean operands, got " + std::string(value_kind(v)));
  return b->value;
}

bool is_number(const ObjectValue& v) {
  return std::holds_alternative<IntVal>(v) || std::holds_alternative<RealVal>(v);
}

double as_real(const ObjectValue& v) {
  if (const auto* i = std::get_if<IntVal>(&v)) return static_cast<double>(i->value);
  return std::get<RealVal>(v).value;
}

ObjectValue arithmetic(BinaryOp op, const ObjectValue& a, const ObjectValue& b) {
  const std::string_view tok = binary_op_token(op);
  if (!is_number(a) || !is_number(b)) {
    eval_fail("operator " + std::string(tok) + " on " + std::string(value_kind(a)) + " and " +
              std::string(value_kind(b)));
  }
  const auto* ia = std::get_if<IntVal>(&a);
  const auto* ib = std::get_if<IntVal>(&b);
  if (ia && ib) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case BinaryOp::Add: overflow = __builtin_add_overflow(ia->value, ib->value, &r); break;
      case BinaryOp::Sub: overflow = __builtin_sub_overflow(ia->value, ib->value, &r); break;
      case BinaryOp::Mul: overflow = __builtin_mul_overflow(ia->value, ib->value, &r); break;
      case BinaryOp::IntDiv:
        if (ib->value == 0) eval_fail("integer division by zero");
        if (ia->value == std::numeric_limits<std::int64_t>::min() && ib->value == -1) {
          overflow = true;
        } else {
          r = ia->value / ib->value;
        }
        break;
      default: eval_fail("not an arithmetic operator");
    }
    if (overflow) eval_fail("integer overflow in " + std::string(tok));
    return IntVal{r};
  }
  if (op == BinaryOp::IntDiv) eval_fail("// needs integer operands");
  const double x = as_real(a);
  const double y = as_real(b);
  double r = 0;
  switch (op) {
    case BinaryOp::Add: r = x + y; break;
    case BinaryOp::Sub: r = x - y; break;
    case BinaryOp::Mul: r = x * y; break;
    default: eval_fail("not an arithmetic operator");
  }
  if (!std::isfinite(r)) eval_fail("real overflow in " + std::string(tok));
  return RealVal{r};
}

bool compare(BinaryOp op, const ObjectValue& a, const ObjectValue& b) {
  const bool equality = op == BinaryOp::Eq || op == BinaryOp::Ne;
  auto result = [&](int cmp) {
    switch (op) {
      case BinaryOp::Eq: return cmp == 0;
      case BinaryOp::Ne: return cmp != 0;
      case BinaryOp::Lt: return cmp < 0;
      case BinaryOp::Le: return cmp <= 0;
      case BinaryOp::Gt: return cmp > 0;
      default: return cmp >= 0;
    }
  };
  if (is_number(a) && is_number(b)) {
    const auto* ia = std::get_if<IntVal>(&a);
    const auto* ib = std::get_if<IntVal>(&b);
    if (ia && ib) return result(ia->value < ib->value ? -1 : (ia->value > ib->value ? 1 : 0));
    const double x = as_real(a);
    const double y = as_real(b);
    return result(x < y ? -1 : (x > y ? 1 : 0));
  }
  const auto* sa = std::get_if<StringVal>(&a);
  const auto* sb = std::get_if<StringVal>(&b);
  if (sa && sb) {
    const int c = sa->value.compare(sb->value);
    return result(c < 0 ? -1 : (c > 0 ? 1 : 0));
  }
  if (equality) {
    if (is_void(a) || is_void(b)) return result(is_void(a) && is_void(b) ? 0 : 1);
    if (a.index() == b.index() &&
        (std::holds_alternative<BoolVal>(a) || std::holds_alternative<RefVal>(a))) {
      return result(a == b ? 0 : 1);
    }
  }
  eval_fail("cannot compare " + std::string(value_kind(a)) + " " + std::string(binary_op_token(op)) +
            " " + std::string(value_kind(b)));
}

ObjectValue eval(const Expr& e, const EvalContext& ctx) {
  return std::visit(
      Overloaded{
          [](const Literal& l) -> ObjectValue { return l.value; },
          [&](const AttributeRef& r) -> ObjectValue { return field_value(*ctx.record, r.name); },
          [&](const OldField& f) -> ObjectValue { return field_value(*ctx.record, f.name); },
          [&](const InputRef& in) -> ObjectValue {
            if (!ctx.inputs) eval_fail("input not available here");
            auto it = ctx.inputs->find(in.name);
            if (it == ctx.inputs->end()) throw Error(ErrorCode::MissingInput, {in.name});
            return it->second;
          },
          [&](const ConvertCall& c) -> ObjectValue {
            if (!ctx.registry) eval_fail("convert not available here");
            return ctx.registry->apply(c.converter, eval(*c.arg, ctx));
          },
          [&](const Unary& u) -> ObjectValue {
            ObjectValue v = eval(*u.operand, ctx);
            if (u.op == UnaryOp::Not) return BoolVal{!as_bool(v, "not")};
            if (const auto* i = std::get_if<IntVal>(&v)) {
              if (i->value == std::numeric_limits<std::int64_t>::min()) eval_fail("integer overflow in -");
              return IntVal{-i->value};
            }
            if (const auto* r = std::get_if<RealVal>(&v)) return RealVal{-r->value};
            eval_fail("unary - on " + std::string(value_kind(v)));
          },
          [&](const Binary& b) -> ObjectValue {
            ObjectValue lhs = eval(*b.lhs, ctx);
            ObjectValue rhs = eval(*b.rhs, ctx);
            switch (b.op) {
              case BinaryOp::Or: {
                const bool l = as_bool(lhs, "or");
                const bool r = as_bool(rhs, "or");
                return BoolVal{l || r};
              }
              case BinaryOp::And: {
                const bool l = as_bool(lhs, "and");
                const bool r = as_bool(rhs, "and");
                return BoolVal{l && r};
              }
              case BinaryOp::Add:
              case BinaryOp::Sub:
              case BinaryOp::Mul:
              case BinaryOp::IntDiv: return arithmetic(b.op, lhs, rhs);
              default: return BoolVal{compare(b.op, lhs, rhs)};
            }
          },
      },
      e.node);
}

// Stores `v` into a field of type `type`, widening integers into reals.
ObjectValue coerce(const TypeExpr& type, ObjectValue v) {
  if (primitive_of(type) == Primitive::Real) {
    if (const auto* i = std::get_if<IntVal>(&v)) return RealVal{static_cast<double>(i->value)};
  }
  return v;
}

}  // namespace

InvariantResult eval_invariant(const ObjectRecord& record, const ClassSchema& schema) {
  EvalContext ctx;
  ctx.record = &record;
  for (const auto& clause : schema.invariant.clauses) {
    ObjectValue v;
    try {
      v = eval(*clause.body, ctx);
    } catch (const EvalFailure& f) {
      throw Error(ErrorCode::TypeMismatchInInvariant, {clause.tag}, f.reason);
    }
    const auto* b = std::get_if<BoolVal>(&v);
    if (!b) {
      throw Error(ErrorCode::TypeMismatchInInvariant, {clause.tag},
                  "clause evaluates to " + std::string(value_kind(v)));
    }
    if (!b->value) return InvariantResult::fail(clause.tag);
  }
  return InvariantResult::ok();
}

ObjectRecord interpret_transformer(const ObjectTransformer& transformer, const ObjectRecord& old,
                                   const InputMap& inputs, const ConverterRegistry& registry,
                                   const ClassSchema& new_schema, const InterpretOptions& options,
                                   std::vector<std::string>* warnings) {
  if (old.class_name != transformer.class_name || old.version != transformer.from_version) {
    throw Error(ErrorCode::InvalidTransformer, {transformer.class_name},
                "record is " + old.class_name + " version " + std::to_string(old.version) +
                    ", transformer expects version " + std::to_string(transformer.from_version));
  }
  if (new_schema.name != transformer.class_name || new_schema.version != transformer.to_version) {
    throw Error(ErrorCode::InvalidTransformer, {transformer.class_name},
                "target schema is " + new_schema.name + " version " +
                    std::to_string(new_schema.version));
  }
  validate_transformer(transformer);
  for (const auto& name : transformer.required_inputs()) {
    if (!inputs.count(name)) throw Error(ErrorCode::MissingInput, {name});
  }

  std::vector<std::optional<ObjectValue>> values(new_schema.attributes.size());
  auto slot = [&](std::size_t index, const std::string& name) -> std::size_t {
    for (std::size_t k = 0; k < new_schema.attributes.size(); ++k) {
      if (new_schema.attributes[k].name == name) return k;
    }
    throw Error(ErrorCode::EvaluationError, {std::to_string(index)},
                name + " is not an attribute of " + new_schema.name + " version " +
                    std::to_string(new_schema.version));
  };

  EvalContext ctx{&old, &inputs, &registry};
  for (std::size_t i = 0; i < transformer.instructions.size(); ++i) {
    const auto& instr = transformer.instructions[i];
    if (const auto* check = std::get_if<CheckAttached>(&instr)) {
      const std::size_t k = slot(i, check->target);
      if (options.check_attachment && (!values[k] || is_void(*values[k]))) {
        throw Error(ErrorCode::AttachmentViolation, {check->target});
      }
      continue;
    }
    ExprPtr source = assigned_value(instr);
    if (!source) continue;  // noop
    const std::string target = *assigned_target(instr);
    const std::size_t k = slot(i, target);
    const TypeExpr& type = *new_schema.attributes[k].type;
    ObjectValue v;
    try {
      v = coerce(type, eval(*source, ctx));
    } catch (const EvalFailure& f) {
      throw Error(ErrorCode::EvaluationError, {std::to_string(i)}, f.reason);
    }
    if (!value_conforms(type, v)) {
      if (is_void(v) && type.is_attached()) {
        if (options.check_attachment) throw Error(ErrorCode::AttachmentViolation, {target});
      } else {
        throw Error(ErrorCode::EvaluationError, {std::to_string(i)},
                    std::string(value_kind(v)) + " value does not conform to " + render_type(type) +
                        " for " + target);
      }
    }
    values[k] = std::move(v);
  }

  ObjectRecord out;
  out.id = old.id;
  out.class_name = new_schema.name;
  out.version = new_schema.version;
  for (std::size_t k = 0; k < new_schema.attributes.size(); ++k) {
    const auto& att = new_schema.attributes[k];
    if (!values[k]) {
      values[k] = default_value(*att.type);
      if (warnings) {
        warnings->push_back(new_schema.name + "." + att.name + " not assigned; defaulted to " +
                            render_value(*values[k]));
      }
    }
    out.fields.push_back(Field{att.name, att.type, std::move(*values[k])});
  }
  return out;
}

}  // namespace escher
