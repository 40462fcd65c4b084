#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "escher/expr.hpp"

namespace escher {

// ---------------------------------------------------------------------------
// Type expressions
//
//   type ::= C | N | type[type] | attached type | detachable type
//
// Generic parameters are a separate lexical class: one uppercase letter
// optionally followed by digits (G, H, K1). A derivation with several actual
// parameters, `TABLE[K, V]`, is the left-nested chain
// GenericDerivation(GenericDerivation(TABLE, K), V).
// ---------------------------------------------------------------------------

class TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct ClassType {
  std::string name;
};
struct GenericParamRef {
  std::string name;
};
struct GenericDerivation {
  TypePtr base;  // ClassType or GenericDerivation
  TypePtr argument;
};
struct Attached {
  TypePtr inner;  // never Attached/Detachable
};
struct Detachable {
  TypePtr inner;  // never Attached/Detachable
};

class TypeExpr {
 public:
  using Node = std::variant<ClassType, GenericParamRef, GenericDerivation, Attached, Detachable>;

  // Construction goes through the factories below, which enforce the
  // marker and derivation-base invariants.
  static TypePtr class_type(std::string name);
  static TypePtr param(std::string name);
  static TypePtr derivation(TypePtr base, TypePtr argument);
  static TypePtr attached(TypePtr inner);
  static TypePtr detachable(TypePtr inner);

  const Node& node() const { return node_; }

  bool is_attached() const { return std::holds_alternative<Attached>(node_); }
  bool is_detachable() const { return std::holds_alternative<Detachable>(node_); }
  bool has_marker() const { return is_attached() || is_detachable(); }

  // Base class name for class types and derivations ("ARRAY" for
  // `attached ARRAY[G]`); empty for generic parameters.
  std::string head_name() const;

 private:
  explicit TypeExpr(Node node) : node_(std::move(node)) {}
  Node node_;
};

// Exact structural equality (markers compared literally).
bool type_identical(const TypeExpr& a, const TypeExpr& b);
inline bool type_identical(const TypePtr& a, const TypePtr& b) { return type_identical(*a, *b); }

// Equality modulo the default attachment: an unmarked type is the same type
// as its `detachable` form.
bool type_equal(const TypeExpr& a, const TypeExpr& b);
inline bool type_equal(const TypePtr& a, const TypePtr& b) { return type_equal(*a, *b); }

// Drops every `detachable` marker, recursively.
TypePtr normalize_type(const TypePtr& t);
// Drops every attachment marker, recursively.
TypePtr strip_markers(const TypePtr& t);

std::string render_type(const TypeExpr& t);
inline std::string render_type(const TypePtr& t) { return render_type(*t); }

bool is_generic_param_token(std::string_view s);

// Built-in primitive class names.
inline constexpr std::string_view kInteger = "INTEGER";
inline constexpr std::string_view kReal = "REAL";
inline constexpr std::string_view kBoolean = "BOOLEAN";
inline constexpr std::string_view kString = "STRING";

enum class Primitive { None, Integer, Real, Boolean, String };
// Primitive denoted by `t` ignoring attachment markers.
Primitive primitive_of(const TypeExpr& t);

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

struct Attribute {
  std::string name;
  TypePtr type;
};

bool operator==(const Attribute& a, const Attribute& b);

struct InvariantClause {
  std::string tag;
  ExprPtr body;
};

bool operator==(const InvariantClause& a, const InvariantClause& b);

struct InvariantExpr {
  std::vector<InvariantClause> clauses;

  bool empty() const { return clauses.empty(); }
  // Attribute names referenced by any clause.
  std::set<std::string> referenced_attributes() const;
};

bool operator==(const InvariantExpr& a, const InvariantExpr& b);

struct ClassSchema {
  std::string name;
  std::vector<std::string> generic_params;
  std::vector<Attribute> attributes;
  InvariantExpr invariant;
  int version = 1;

  const Attribute* find(std::string_view attribute) const;
  bool has(std::string_view attribute) const { return find(attribute) != nullptr; }
};

// Structural equality including the version tag.
bool operator==(const ClassSchema& a, const ClassSchema& b);

// Same attributes (name + type_equal types, order-insensitive).
bool same_attribute_set(const ClassSchema& a, const ClassSchema& b);

// Same attribute list, invariant and generic parameters; the version tag is
// ignored. This is the "changed" test used when releasing.
bool same_shape(const ClassSchema& a, const ClassSchema& b);

// Checks the ClassSchema invariants; throws DuplicateAttribute,
// UnknownGenericParam or InvariantRefersUnknownAttribute.
void validate_schema(const ClassSchema& schema);

// Parses the `.esc` class DSL.
//
//   [version <n>]
//   class NAME [ '[' G {, G} ']' ]
//   feature
//     name: type ...
//   [invariant
//     tag: expr ...]
//   end
ClassSchema parse_schema(std::string_view source);

// Canonical text; parse_schema(render_schema(s)) == s.
std::string render_schema(const ClassSchema& schema);

// Parses a single type expression in the context of the given generic
// parameters (used by the object-file reader).
TypePtr parse_type(std::string_view text, const std::vector<std::string>& generic_params = {});

}  // namespace escher
