#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "escher/object_graph.hpp"
#include "escher/schema.hpp"
#include "escher/transformer.hpp"

namespace escher {

struct InvariantResult {
  bool pass = true;
  std::string failed_clause;  // tag of the first false clause

  static InvariantResult ok() { return {}; }
  static InvariantResult fail(std::string tag) { return {false, std::move(tag)}; }
};

// Evaluates the schema invariant over the record's fields, clause by clause.
// Integer comparisons are exact, any real operand promotes to real, strings
// compare by code point, and `x = Void` holds iff x is Void.
// Throws TypeMismatchInInvariant(tag) or MissingAttribute(name).
InvariantResult eval_invariant(const ObjectRecord& record, const ClassSchema& schema);

using InputMap = std::map<std::string, ObjectValue>;

struct InterpretOptions {
  // Enforce require_attached and attached field types.
  bool check_attachment = true;
};

// Runs a transformer over one stored record, producing a record of the
// transformer's target version with exactly the target schema's fields.
// Attributes no instruction assigns get their type's default value and a
// warning. Throws MissingInput, ConversionFailure, AttachmentViolation,
// EvaluationError, MissingAttribute or InvalidTransformer.
ObjectRecord interpret_transformer(const ObjectTransformer& transformer, const ObjectRecord& old,
                                   const InputMap& inputs, const ConverterRegistry& registry,
                                   const ClassSchema& new_schema,
                                   const InterpretOptions& options = {},
                                   std::vector<std::string>* warnings = nullptr);

}  // namespace escher
