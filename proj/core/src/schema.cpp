#include "escher/schema.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include "escher/error.hpp"
#include "internal/lexer.hpp"
#include "internal/overloaded.hpp"
#include "internal/schema_parse.hpp"

namespace escher {

using detail::Overloaded;

// ---------------------------------------------------------------------------
// TypeExpr
// ---------------------------------------------------------------------------

TypePtr TypeExpr::class_type(std::string name) {
  return TypePtr(new TypeExpr(ClassType{std::move(name)}));
}

TypePtr TypeExpr::param(std::string name) {
  return TypePtr(new TypeExpr(GenericParamRef{std::move(name)}));
}

TypePtr TypeExpr::derivation(TypePtr base, TypePtr argument) {
  const auto& n = base->node();
  if (!std::holds_alternative<ClassType>(n) && !std::holds_alternative<GenericDerivation>(n)) {
    throw std::invalid_argument("generic derivation base must be a class type");
  }
  return TypePtr(new TypeExpr(GenericDerivation{std::move(base), std::move(argument)}));
}

TypePtr TypeExpr::attached(TypePtr inner) {
  if (inner->has_marker()) throw std::invalid_argument("nested attachment marker");
  return TypePtr(new TypeExpr(Attached{std::move(inner)}));
}

TypePtr TypeExpr::detachable(TypePtr inner) {
  if (inner->has_marker()) throw std::invalid_argument("nested attachment marker");
  return TypePtr(new TypeExpr(Detachable{std::move(inner)}));
}

std::string TypeExpr::head_name() const {
  return std::visit(Overloaded{
                        [](const ClassType& c) { return c.name; },
                        [](const GenericParamRef&) { return std::string(); },
                        [](const GenericDerivation& d) { return d.base->head_name(); },
                        [](const Attached& a) { return a.inner->head_name(); },
                        [](const Detachable& d) { return d.inner->head_name(); },
                    },
                    node_);
}

bool type_identical(const TypeExpr& a, const TypeExpr& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      Overloaded{
          [&](const ClassType& x) { return x.name == std::get<ClassType>(b.node()).name; },
          [&](const GenericParamRef& x) {
            return x.name == std::get<GenericParamRef>(b.node()).name;
          },
          [&](const GenericDerivation& x) {
            const auto& y = std::get<GenericDerivation>(b.node());
            return type_identical(*x.base, *y.base) && type_identical(*x.argument, *y.argument);
          },
          [&](const Attached& x) {
            return type_identical(*x.inner, *std::get<Attached>(b.node()).inner);
          },
          [&](const Detachable& x) {
            return type_identical(*x.inner, *std::get<Detachable>(b.node()).inner);
          },
      },
      a.node());
}

TypePtr normalize_type(const TypePtr& t) {
  return std::visit(Overloaded{
                        [&](const ClassType&) { return t; },
                        [&](const GenericParamRef&) { return t; },
                        [&](const GenericDerivation& d) {
                          return TypeExpr::derivation(normalize_type(d.base),
                                                      normalize_type(d.argument));
                        },
                        [&](const Attached& a) { return TypeExpr::attached(normalize_type(a.inner)); },
                        [&](const Detachable& d) { return normalize_type(d.inner); },
                    },
                    t->node());
}

TypePtr strip_markers(const TypePtr& t) {
  return std::visit(Overloaded{
                        [&](const ClassType&) { return t; },
                        [&](const GenericParamRef&) { return t; },
                        [&](const GenericDerivation& d) {
                          return TypeExpr::derivation(strip_markers(d.base),
                                                      strip_markers(d.argument));
                        },
                        [&](const Attached& a) { return strip_markers(a.inner); },
                        [&](const Detachable& d) { return strip_markers(d.inner); },
                    },
                    t->node());
}

bool type_equal(const TypeExpr& a, const TypeExpr& b) {
  // Compare modulo `detachable`: unwrap top-level detachable markers, then
  // recurse so nested arguments get the same treatment.
  const TypeExpr* x = &a;
  const TypeExpr* y = &b;
  if (const auto* d = std::get_if<Detachable>(&x->node())) x = d->inner.get();
  if (const auto* d = std::get_if<Detachable>(&y->node())) y = d->inner.get();
  if (x->node().index() != y->node().index()) return false;
  return std::visit(
      Overloaded{
          [&](const ClassType& p) { return p.name == std::get<ClassType>(y->node()).name; },
          [&](const GenericParamRef& p) {
            return p.name == std::get<GenericParamRef>(y->node()).name;
          },
          [&](const GenericDerivation& p) {
            const auto& q = std::get<GenericDerivation>(y->node());
            return type_equal(*p.base, *q.base) && type_equal(*p.argument, *q.argument);
          },
          [&](const Attached& p) { return type_equal(*p.inner, *std::get<Attached>(y->node()).inner); },
          [](const Detachable&) { return false; },
      },
      x->node());
}

std::string render_type(const TypeExpr& t) {
  return std::visit(Overloaded{
                        [](const ClassType& c) { return c.name; },
                        [](const GenericParamRef& p) { return p.name; },
                        [](const GenericDerivation& d) {
                          // Left-nested chains print as one bracket list.
                          std::vector<const TypeExpr*> args;
                          const TypeExpr* cur = nullptr;
                          const GenericDerivation* g = &d;
                          for (;;) {
                            args.push_back(g->argument.get());
                            cur = g->base.get();
                            g = std::get_if<GenericDerivation>(&cur->node());
                            if (!g) break;
                          }
                          std::string out = render_type(*cur) + "[";
                          for (auto it = args.rbegin(); it != args.rend(); ++it) {
                            if (it != args.rbegin()) out += ", ";
                            out += render_type(**it);
                          }
                          return out + "]";
                        },
                        [](const Attached& a) { return "attached " + render_type(*a.inner); },
                        [](const Detachable& d) { return "detachable " + render_type(*d.inner); },
                    },
                    t.node());
}

bool is_generic_param_token(std::string_view s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

Primitive primitive_of(const TypeExpr& t) {
  const TypeExpr* x = &t;
  if (const auto* a = std::get_if<Attached>(&x->node())) x = a->inner.get();
  if (const auto* d = std::get_if<Detachable>(&x->node())) x = d->inner.get();
  const auto* c = std::get_if<ClassType>(&x->node());
  if (!c) return Primitive::None;
  if (c->name == kInteger) return Primitive::Integer;
  if (c->name == kReal) return Primitive::Real;
  if (c->name == kBoolean) return Primitive::Boolean;
  if (c->name == kString) return Primitive::String;
  return Primitive::None;
}

// ---------------------------------------------------------------------------
// Schema equality and validation
// ---------------------------------------------------------------------------

bool operator==(const Attribute& a, const Attribute& b) {
  return a.name == b.name && type_identical(a.type, b.type);
}

bool operator==(const InvariantClause& a, const InvariantClause& b) {
  return a.tag == b.tag && expr_equal(a.body, b.body);
}

bool operator==(const InvariantExpr& a, const InvariantExpr& b) { return a.clauses == b.clauses; }

std::set<std::string> InvariantExpr::referenced_attributes() const {
  std::set<std::string> out;
  for (const auto& c : clauses) collect_attribute_refs(*c.body, out);
  return out;
}

const Attribute* ClassSchema::find(std::string_view attribute) const {
  for (const auto& a : attributes) {
    if (a.name == attribute) return &a;
  }
  return nullptr;
}

bool operator==(const ClassSchema& a, const ClassSchema& b) {
  return a.name == b.name && a.generic_params == b.generic_params &&
         a.attributes == b.attributes && a.invariant == b.invariant && a.version == b.version;
}

bool same_attribute_set(const ClassSchema& a, const ClassSchema& b) {
  if (a.attributes.size() != b.attributes.size()) return false;
  for (const auto& att : a.attributes) {
    const Attribute* other = b.find(att.name);
    if (!other || !type_equal(att.type, other->type)) return false;
  }
  return true;
}

bool same_shape(const ClassSchema& a, const ClassSchema& b) {
  if (a.name != b.name || a.generic_params != b.generic_params) return false;
  if (a.attributes.size() != b.attributes.size()) return false;
  for (std::size_t i = 0; i < a.attributes.size(); ++i) {
    if (a.attributes[i].name != b.attributes[i].name ||
        !type_equal(a.attributes[i].type, b.attributes[i].type)) {
      return false;
    }
  }
  return a.invariant == b.invariant;
}

namespace {

void check_params(const TypeExpr& t, const std::vector<std::string>& params) {
  std::visit(Overloaded{
                 [](const ClassType&) {},
                 [&](const GenericParamRef& p) {
                   if (std::find(params.begin(), params.end(), p.name) == params.end()) {
                     throw Error(ErrorCode::UnknownGenericParam, {p.name});
                   }
                 },
                 [&](const GenericDerivation& d) {
                   check_params(*d.base, params);
                   check_params(*d.argument, params);
                 },
                 [&](const Attached& a) { check_params(*a.inner, params); },
                 [&](const Detachable& d) { check_params(*d.inner, params); },
             },
             t.node());
}

}  // namespace

void validate_schema(const ClassSchema& schema) {
  std::set<std::string> params;
  for (const auto& p : schema.generic_params) {
    if (!params.insert(p).second) {
      throw Error(ErrorCode::DuplicateAttribute, {p}, "generic parameter declared twice");
    }
  }
  std::set<std::string> names;
  for (const auto& a : schema.attributes) {
    if (!names.insert(a.name).second || params.count(a.name)) {
      throw Error(ErrorCode::DuplicateAttribute, {a.name});
    }
    check_params(*a.type, schema.generic_params);
  }
  for (const auto& c : schema.invariant.clauses) {
    std::set<std::string> refs;
    collect_attribute_refs(*c.body, refs);
    for (const auto& r : refs) {
      if (!names.count(r)) throw Error(ErrorCode::InvariantRefersUnknownAttribute, {c.tag, r});
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

namespace {

std::string expect_name(TokenCursor& cur, std::string_view what) {
  const Token& t = cur.peek();
  if (t.kind != TokKind::Ident || is_schema_keyword(t.text)) cur.fail(what);
  return cur.next().text;
}

TypePtr parse_type_operand(TokenCursor& cur, const std::vector<std::string>* params);

TypePtr parse_type_unmarked(TokenCursor& cur, const std::vector<std::string>* params) {
  const Token head = cur.peek();
  std::string name = expect_name(cur, "type name");
  const bool declared =
      params && std::find(params->begin(), params->end(), name) != params->end();
  if (declared || (!params && is_generic_param_token(name))) {
    if (cur.at_symbol("[")) cur.fail("end of type (generic parameter cannot be derived)");
    return TypeExpr::param(std::move(name));
  }
  if (params && is_generic_param_token(name)) {
    throw Error(ErrorCode::UnknownGenericParam, {name},
                "at " + std::to_string(head.line) + ":" + std::to_string(head.column));
  }
  TypePtr type = TypeExpr::class_type(std::move(name));
  if (cur.accept_symbol("[")) {
    do {
      type = TypeExpr::derivation(type, parse_type_operand(cur, params));
    } while (cur.accept_symbol(","));
    cur.expect_symbol("]");
  }
  return type;
}

TypePtr parse_type_operand(TokenCursor& cur, const std::vector<std::string>* params) {
  if (cur.accept_keyword("attached")) return TypeExpr::attached(parse_type_unmarked(cur, params));
  if (cur.accept_keyword("detachable")) {
    return TypeExpr::detachable(parse_type_unmarked(cur, params));
  }
  return parse_type_unmarked(cur, params);
}

}  // namespace

TypePtr parse_type_expr(TokenCursor& cursor, const std::vector<std::string>* generic_params) {
  return parse_type_operand(cursor, generic_params);
}

}  // namespace detail

ClassSchema parse_schema(std::string_view source) {
  detail::TokenCursor cur(detail::tokenize(source));
  ClassSchema schema;
  if (cur.accept_keyword("version")) {
    const auto& t = cur.peek();
    const std::int64_t v = cur.expect_integer("version number");
    if (v < 1 || v > std::numeric_limits<int>::max()) {
      detail::syntax_error(t.line, t.column, "positive version number");
    }
    schema.version = static_cast<int>(v);
  }
  cur.expect_keyword("class");
  schema.name = detail::expect_name(cur, "class name");
  if (cur.accept_symbol("[")) {
    do {
      const detail::Token& t = cur.peek();
      if (t.kind != detail::TokKind::Ident || !is_generic_param_token(t.text)) {
        cur.fail("generic parameter");
      }
      schema.generic_params.push_back(cur.next().text);
    } while (cur.accept_symbol(","));
    cur.expect_symbol("]");
  }
  cur.expect_keyword("feature");
  std::set<std::string> seen;
  while (cur.peek().kind == detail::TokKind::Ident && !detail::is_schema_keyword(cur.peek().text)) {
    Attribute att;
    att.name = cur.next().text;
    cur.expect_symbol(":");
    att.type = detail::parse_type_expr(cur, &schema.generic_params);
    schema.attributes.push_back(std::move(att));
  }
  if (cur.accept_keyword("invariant")) {
    while (cur.peek().kind == detail::TokKind::Ident && !detail::is_schema_keyword(cur.peek().text)) {
      InvariantClause clause;
      clause.tag = cur.next().text;
      cur.expect_symbol(":");
      clause.body = detail::parse_expression(cur, detail::ExprMode::Invariant);
      schema.invariant.clauses.push_back(std::move(clause));
    }
  }
  cur.expect_keyword("end");
  if (!cur.at_end()) cur.fail("end of input");
  validate_schema(schema);
  return schema;
}

TypePtr parse_type(std::string_view text, const std::vector<std::string>& generic_params) {
  detail::TokenCursor cur(detail::tokenize(text));
  TypePtr t = detail::parse_type_expr(cur, &generic_params);
  if (!cur.at_end()) cur.fail("end of type");
  return t;
}

std::string render_schema(const ClassSchema& schema) {
  std::ostringstream out;
  out << "version " << schema.version << "\n";
  out << "class " << schema.name;
  if (!schema.generic_params.empty()) {
    out << " [";
    for (std::size_t i = 0; i < schema.generic_params.size(); ++i) {
      if (i) out << ", ";
      out << schema.generic_params[i];
    }
    out << "]";
  }
  out << " feature\n";
  for (const auto& a : schema.attributes) {
    out << "  " << a.name << ": " << render_type(a.type) << "\n";
  }
  if (!schema.invariant.empty()) {
    out << "invariant\n";
    for (const auto& c : schema.invariant.clauses) {
      out << "  " << c.tag << ": " << render_expr(*c.body) << "\n";
    }
  }
  out << "end\n";
  return out.str();
}

}  // namespace escher
