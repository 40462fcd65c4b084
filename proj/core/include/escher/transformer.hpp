#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "escher/expr.hpp"
#include "escher/schema.hpp"
#include "escher/smo.hpp"
#include "escher/value.hpp"

namespace escher {

// ---------------------------------------------------------------------------
// Object transformer instructions
// ---------------------------------------------------------------------------

// Result.<target> := oldc.<source>
struct CopyField {
  std::string target;
  std::string source;
};
// Result.<target> := input <target>
struct AssignInput {
  std::string target;
};
// Result.<target> := convert <converter> (oldc.<source>)
struct AssignConverted {
  std::string target;
  std::string converter;
  std::string source;
};
// Result.<target> := <expr>  -- any other source expression; hand-edited only
struct AssignExpr {
  std::string target;
  ExprPtr value;
};
// -- warning: <warning>
// noop
struct Noop {
  std::string warning;
};
// require_attached Result.<target>
struct CheckAttached {
  std::string target;
};

using TransformerInstr =
    std::variant<CopyField, AssignInput, AssignConverted, AssignExpr, Noop, CheckAttached>;

bool instr_equal(const TransformerInstr& a, const TransformerInstr& b);

// Target attribute of an assigning instruction.
std::optional<std::string> assigned_target(const TransformerInstr& instr);

// Source expression of an assigning instruction (nullptr otherwise).
ExprPtr assigned_value(const TransformerInstr& instr);

struct ObjectTransformer {
  std::string class_name;
  int from_version = 1;
  int to_version = 2;
  std::vector<TransformerInstr> instructions;

  // Every `input <name>` the instructions read.
  std::set<std::string> required_inputs() const;
  std::vector<std::string> warnings() const;
};

bool operator==(const ObjectTransformer& a, const ObjectTransformer& b);

// Checks from != to and at most one assignment per target. Throws
// InvalidTransformer or DuplicateTarget.
void validate_transformer(const ObjectTransformer& t);

// Additionally checks targets against the target schema and oldc fields
// against the source schema. Throws InvalidTransformer.
void validate_transformer(const ObjectTransformer& t, const ClassSchema& source,
                          const ClassSchema& target);

// ---------------------------------------------------------------------------
// Converters
// ---------------------------------------------------------------------------

struct Converter {
  using Function = std::function<ObjectValue(const ObjectValue&)>;

  std::string id;
  TypePtr source;
  TypePtr target;
  Function fn;  // throws Error(ConversionFailure) on values it cannot map
};

// Immutable lookup table of value converters, at most one per
// (source type, target type) pair.
class ConverterRegistry {
 public:
  ConverterRegistry() = default;
  explicit ConverterRegistry(std::vector<Converter> converters);

  // STRING_TO_INTEGER, INTEGER_TO_STRING, INTEGER_TO_REAL, REAL_TO_INTEGER,
  // STRING_TO_REAL, REAL_TO_STRING.
  static const ConverterRegistry& builtins();

  // Copy of this registry plus one converter. Throws DuplicateConverter.
  ConverterRegistry with(Converter converter) const;

  const Converter* find(const TypePtr& source, const TypePtr& target) const;
  const Converter* find_id(std::string_view id) const;
  const std::vector<Converter>& converters() const { return converters_; }

  // Throws UnknownConverter or ConversionFailure.
  ObjectValue apply(std::string_view id, const ObjectValue& value) const;

 private:
  std::vector<Converter> converters_;
};

// True iff a value of type `from` may be stored in a field of type `to`
// without a converter.
bool assignable(const TypePtr& from, const TypePtr& to);

// ---------------------------------------------------------------------------
// Generation and the `.est` file format
// ---------------------------------------------------------------------------

// Total: every SMO maps to instructions; untranslatable cases become
// warnings plus input placeholders. Throws InvalidTransformer only when the
// two schemas carry the same version tag.
ObjectTransformer generate_transformer(const ClassTransformation& transformation,
                                       const ConverterRegistry& registry =
                                           ConverterRegistry::builtins());

ObjectTransformer parse_transformer(std::string_view source,
                                    const ConverterRegistry& registry =
                                        ConverterRegistry::builtins());

std::string render_transformer(const ObjectTransformer& t);

std::string render_instruction(const TransformerInstr& instr);

}  // namespace escher
