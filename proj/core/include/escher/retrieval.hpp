#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "escher/interpreter.hpp"
#include "escher/object_graph.hpp"
#include "escher/repository.hpp"

namespace escher {

struct RetrieveOptions {
  // Invariant gate and attachment checks.
  bool check_assertions = true;
  // Only a directly registered from->to transformer may be used.
  bool strict_direct = false;
};

// (class, attribute) -> value supplied for `input` placeholders.
using RetrieveInputs = std::map<std::pair<std::string, std::string>, ObjectValue>;

// Shortest chain of registered transformers from `from` to `to`, ties broken
// by the lexicographically smallest version sequence. Returns the visited
// versions including both ends, or nullopt.
std::optional<std::vector<int>> migration_path(const Repository& repo, std::string_view class_name,
                                               int from, int to, bool strict_direct = false);

// Migrates every record whose version differs from its class's target
// version, then checks each record against its target schema's invariant.
// Classes missing from `target_versions` target their latest version.
// Throws HandlerMissing(class), TransformationMissing(class, from, to),
// InvariantViolation(class, id, tag), UnknownVersion or any
// interpret_transformer error.
ObjectGraph retrieve(const ObjectGraph& graph, const Repository& repo,
                     const std::map<std::string, int>& target_versions,
                     const RetrieveInputs& inputs, const RetrieveOptions& options = {},
                     std::vector<std::string>* warnings = nullptr,
                     const ConverterRegistry& registry = ConverterRegistry::builtins());

}  // namespace escher
