#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace escher {

// Every failure the toolkit reports is one of these. The enumerator name is
// the stable, machine-readable token printed by the CLI.
enum class ErrorCode {
  // schema_model
  SyntaxError,
  DuplicateAttribute,
  UnknownGenericParam,
  InvariantRefersUnknownAttribute,
  // smo_engine
  PremiseViolated,
  InvariantDanglesAfterRemoval,
  MismatchedClassIdentity,
  // transformer_gen
  UnknownConverter,
  DuplicateTarget,
  DuplicateConverter,
  InvalidTransformer,
  // object_runtime
  FormatError,
  DanglingReference,
  TypeMismatchInInvariant,
  MissingAttribute,
  MissingInput,
  ConversionFailure,
  AttachmentViolation,
  EvaluationError,
  HandlerMissing,
  TransformationMissing,
  InvariantViolation,
  // release_manager
  VersionTagTamper,
  UnknownVersion,
  OverwriteRefused,
  InvariantNeedsFilteredAttribute,
  UnknownAttribute,
  UnknownClass,
  RepositoryLocked,
  // per_metric
  DegenerateHistory,
  EmptyRelease,
  // plumbing
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Domain error carrying a code plus the positional arguments that identify the
// failing entity (class name, record id, clause tag, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::vector<std::string> args, std::string detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& args() const noexcept { return args_; }
  const std::string& detail() const noexcept { return detail_; }

  // "<CodeName> <arg1> <arg2> ..." - the first line the CLI prints.
  std::string summary() const;

 private:
  ErrorCode code_;
  std::vector<std::string> args_;
  std::string detail_;
};

}  // namespace escher
