#pragma once

#include <string>
#include <variant>
#include <vector>

#include "escher/schema.hpp"

namespace escher {

// Schema Modification Operators: each one changes at most one attribute.

struct NoChange {
  Attribute attribute;
};
struct Added {
  Attribute attribute;
};
struct Renamed {
  std::string old_name;
  std::string new_name;
  TypePtr type;
  bool candidate = true;  // inferred statically, semantics unconfirmed
};
struct TypeChanged {
  std::string name;
  TypePtr old_type;
  TypePtr new_type;
};
struct Removed {
  std::string name;
  TypePtr old_type;
};
struct AttachAdded {
  std::string name;
  TypePtr inner_type;
};

using Smo = std::variant<NoChange, Added, Renamed, TypeChanged, Removed, AttachAdded>;

bool smo_equal(const Smo& a, const Smo& b);

// One report line: "smo type_changed info STRING -> INTEGER".
std::string render_smo(const Smo& smo);

struct ClassTransformation {
  ClassSchema source;
  ClassSchema target;
  std::vector<Smo> smos;
  // Informational findings that do not affect migration (e.g. an attachment
  // marker relaxed from attached to detachable).
  std::vector<std::string> notes;
};

std::string render_report(const ClassTransformation& t);

struct ApplyOptions {
  // Drop invariant clauses that would reference a removed or renamed
  // attribute (recording a warning) instead of failing.
  bool drop_dangling_clauses = false;
};

// Applies one SMO according to its inference rule. Throws PremiseViolated or
// InvariantDanglesAfterRemoval.
ClassSchema apply_smo(const ClassSchema& schema, const Smo& smo, const ApplyOptions& options = {},
                      std::vector<std::string>* warnings = nullptr);

// Left fold of apply_smo. Errors are rethrown with the failing index
// appended to their arguments.
ClassSchema apply_transformation(const ClassSchema& schema, const std::vector<Smo>& smos,
                                 const ApplyOptions& options = {},
                                 std::vector<std::string>* warnings = nullptr);

// Static AST comparison heuristics. Result order: NoChange (new order),
// TypeChanged/AttachAdded (new order), Renamed (old order), Removed (old
// order), Added (new order). Throws MismatchedClassIdentity.
ClassTransformation diff_schemas(const ClassSchema& old_schema, const ClassSchema& new_schema);

// Remove every old attribute, then add every new one.
ClassTransformation completeness_witness(const ClassSchema& old_schema,
                                         const ClassSchema& new_schema);

}  // namespace escher
