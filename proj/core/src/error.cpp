#include "escher/error.hpp"

namespace escher {
namespace {

std::string compose(ErrorCode code, const std::vector<std::string>& args,
                    const std::string& detail) {
  std::string out(error_code_name(code));
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::UnknownGenericParam: return "UnknownGenericParam";
    case ErrorCode::InvariantRefersUnknownAttribute: return "InvariantRefersUnknownAttribute";
    case ErrorCode::PremiseViolated: return "PremiseViolated";
    case ErrorCode::InvariantDanglesAfterRemoval: return "InvariantDanglesAfterRemoval";
    case ErrorCode::MismatchedClassIdentity: return "MismatchedClassIdentity";
    case ErrorCode::UnknownConverter: return "UnknownConverter";
    case ErrorCode::DuplicateTarget: return "DuplicateTarget";
    case ErrorCode::DuplicateConverter: return "DuplicateConverter";
    case ErrorCode::InvalidTransformer: return "InvalidTransformer";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::TypeMismatchInInvariant: return "TypeMismatchInInvariant";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::ConversionFailure: return "ConversionFailure";
    case ErrorCode::AttachmentViolation: return "AttachmentViolation";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::HandlerMissing: return "HandlerMissing";
    case ErrorCode::TransformationMissing: return "TransformationMissing";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::VersionTagTamper: return "VersionTagTamper";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::OverwriteRefused: return "OverwriteRefused";
    case ErrorCode::InvariantNeedsFilteredAttribute: return "InvariantNeedsFilteredAttribute";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::RepositoryLocked: return "RepositoryLocked";
    case ErrorCode::DegenerateHistory: return "DegenerateHistory";
    case ErrorCode::EmptyRelease: return "EmptyRelease";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, std::vector<std::string> args, std::string detail)
    : std::runtime_error(compose(code, args, detail)),
      code_(code),
      args_(std::move(args)),
      detail_(std::move(detail)) {}

std::string Error::summary() const {
  std::string out(error_code_name(code_));
  for (const auto& a : args_) {
    out += ' ';
    out += a;
  }
  return out;
}

}  // namespace escher
