#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace escher {

struct IntVal {
  std::int64_t value = 0;
  bool operator==(const IntVal&) const = default;
};

struct RealVal {
  double value = 0.0;
  bool operator==(const RealVal&) const = default;
};

struct BoolVal {
  bool value = false;
  bool operator==(const BoolVal&) const = default;
};

struct StringVal {
  std::string value;
  bool operator==(const StringVal&) const = default;
};

struct VoidVal {
  bool operator==(const VoidVal&) const = default;
};

// Reference to another record of the same object graph, by id.
struct RefVal {
  std::uint64_t id = 0;
  bool operator==(const RefVal&) const = default;
};

using ObjectValue = std::variant<IntVal, RealVal, BoolVal, StringVal, VoidVal, RefVal>;

inline bool is_void(const ObjectValue& v) { return std::holds_alternative<VoidVal>(v); }

// Short lowercase name of the value's kind, for diagnostics ("integer", "void", ...).
std::string_view value_kind(const ObjectValue& v);

// Object-file literal syntax: 42, -3, 2.5, 1.0e+20, true, "a\"b", Void, ref 7.
// Reals use the shortest decimal that round-trips and always contain a '.'.
// Throws Error(FormatError) for non-finite reals.
std::string render_value(const ObjectValue& v);

std::string render_real(double d);
std::string quote_string(std::string_view s);

}  // namespace escher
