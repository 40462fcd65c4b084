#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "escher/schema.hpp"
#include "escher/value.hpp"

namespace escher {

struct Field {
  std::string name;
  TypePtr type;  // declared type at the record's version
  ObjectValue value;
};

bool operator==(const Field& a, const Field& b);

struct ObjectRecord {
  std::uint64_t id = 0;
  std::string class_name;
  int version = 1;
  std::vector<Field> fields;

  const Field* find(std::string_view name) const;
};

bool operator==(const ObjectRecord& a, const ObjectRecord& b);

// Flat object table; record i has id i and record 0 is the root. References
// may form cycles.
struct ObjectGraph {
  std::vector<ObjectRecord> records;
};

bool operator==(const ObjectGraph& a, const ObjectGraph& b);

// Throws FormatError (ids not dense, duplicate field names) or
// DanglingReference.
void validate_graph(const ObjectGraph& graph);

// Canonical `.eso` text:
//
//   ESCHER-OBJECTS 1
//   obj 0 BANK_ACCOUNT version 1
//     info: STRING = "42"
//   end
std::string serialize(const ObjectGraph& graph);

// Throws FormatError(line, reason) or DanglingReference(id).
ObjectGraph deserialize(std::string_view text);

// Parses a single value in object-file literal syntax (used for command-line
// inputs). Throws FormatError.
ObjectValue parse_value(std::string_view text);

// Whether `value` may be stored in a field declared with `type`. Object types
// hold references or Void; attached types never hold Void.
bool value_conforms(const TypeExpr& type, const ObjectValue& value);

// Default value of a freshly created field: 0, 0.0, false, "" or Void.
ObjectValue default_value(const TypeExpr& type);

}  // namespace escher
