#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "escher/object_graph.hpp"
#include "escher/schema.hpp"
#include "escher/transformer.hpp"

namespace escher {

struct Release {
  int number = 1;
  std::map<std::string, ClassSchema> schemas;
};

bool operator==(const Release& a, const Release& b);

using VersionPair = std::pair<int, int>;  // (from, to)

struct Handler {
  ObjectTransformer transformer;
  std::string digest;  // SHA-256 of the rendered text when it was generated or registered
};

struct Repository {
  std::string project_name;
  std::vector<Release> releases;
  std::map<std::string, std::map<VersionPair, Handler>> handlers;

  int latest_release() const { return releases.empty() ? 0 : releases.back().number; }
  const Release* release(int number) const;
  // Latest version tag of a class across all releases; 0 if never released.
  int latest_version(std::string_view class_name) const;
  const ClassSchema* schema(std::string_view class_name, int version) const;
  const ClassSchema* latest_schema(std::string_view class_name) const;
  std::set<std::string> class_names() const;
  bool has_handler(std::string_view class_name) const;
  const ObjectTransformer* transformer(std::string_view class_name, int from, int to) const;
};

bool operator==(const Repository& a, const Repository& b);

enum class ClassStatus { New, Changed, Unchanged };

struct ReleaseReport {
  struct Entry {
    std::string class_name;
    int version = 1;
    ClassStatus status = ClassStatus::Unchanged;
  };
  bool no_op = true;
  int release_number = 0;
  std::vector<Entry> classes;
  std::vector<std::pair<std::string, VersionPair>> stubs;
  std::vector<std::string> notes;
};

// `release 2`, `class NAME version v changed|new|unchanged`, `stub C f t`,
// `note ...` lines, or a single `no-op` line.
std::string render_release_report(const ReleaseReport& report);

std::string sha256_hex(std::string_view data);

// Compares every working-set class with its latest released schema. Classes
// absent from the working set are carried over unchanged. A working-set
// schema must carry the latest tag, or latest+1 when it changed (1 for a new
// class); anything else throws VersionTagTamper. Forward stubs are generated
// for changed classes unless a transformer for that pair already exists.
Repository release(const Repository& repo, const std::map<std::string, ClassSchema>& working_set,
                   ReleaseReport* report = nullptr,
                   const ConverterRegistry& registry = ConverterRegistry::builtins());

// Throws UnknownVersion, OverwriteRefused, InvalidTransformer or
// DuplicateTarget.
Repository register_transformer(const Repository& repo, const ObjectTransformer& t,
                                bool overwrite = false);

// Throws UnknownAttribute(name) or InvariantNeedsFilteredAttribute(tag, name).
ClassSchema apply_filter(const ClassSchema& schema, const std::set<std::string>& keep);

// The persisted view of a record under a filtered schema.
ObjectRecord filter_record(const ObjectRecord& record, const ClassSchema& filtered);

// ---------------------------------------------------------------------------
// Project directory
//
//   escher.manifest
//   releases/<n>/<CLASS>.esc
//   handlers/<CLASS>/<from>_to_<to>.est
// ---------------------------------------------------------------------------

// Exclusive advisory lock on the project directory, held for the object's
// lifetime. Blocks until available.
class RepositoryLock {
 public:
  explicit RepositoryLock(const std::filesystem::path& project_dir);
  ~RepositoryLock();
  RepositoryLock(const RepositoryLock&) = delete;
  RepositoryLock& operator=(const RepositoryLock&) = delete;

 private:
  int fd_ = -1;
};

bool is_project(const std::filesystem::path& dir);

// Throws IoError, FormatError or any schema / transformer parse error.
Repository load_repository(const std::filesystem::path& dir);

std::string render_manifest(const Repository& repo);

// Writes the manifest, release schemas and missing handler files. An
// existing handler file is rewritten only when its content no longer matches
// the registered transformer and `overwrite_handlers` is set; otherwise
// OverwriteRefused.
void save_repository(const Repository& repo, const std::filesystem::path& dir,
                     bool overwrite_handlers = false);

std::filesystem::path handler_path(const std::filesystem::path& dir, std::string_view class_name,
                                   int from, int to);

// True when the handler file on disk differs from what was recorded at
// generation time, i.e. the user edited it.
bool handler_modified(const Repository& repo, const std::filesystem::path& dir,
                      std::string_view class_name, int from, int to);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace escher
