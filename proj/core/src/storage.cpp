#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include "escher/error.hpp"
#include "escher/repository.hpp"

namespace escher {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "escher.manifest";
constexpr const char* kLockFile = ".escher.lock";

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::IoError, {path.string()}, what);
}

[[noreturn]] void manifest_error(int line, std::string reason) {
  throw Error(ErrorCode::FormatError, {std::to_string(line)}, "escher.manifest: " + std::move(reason));
}

int parse_positive(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size() && v >= 1) return v;
  } catch (const std::exception&) {
  }
  manifest_error(line, "expected a positive integer, found '" + s + "'");
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) io_error(path, "write failed");
}

RepositoryLock::RepositoryLock(const fs::path& project_dir) {
  const fs::path p = project_dir / kLockFile;
  fd_ = ::open(p.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) io_error(p, std::strerror(errno));
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) {
      ::close(fd_);
      throw Error(ErrorCode::RepositoryLocked, {project_dir.string()}, std::strerror(errno));
    }
  }
}

RepositoryLock::~RepositoryLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

bool is_project(const fs::path& dir) { return fs::is_regular_file(dir / kManifest); }

fs::path handler_path(const fs::path& dir, std::string_view class_name, int from, int to) {
  return dir / "handlers" / std::string(class_name) /
         (std::to_string(from) + "_to_" + std::to_string(to) + ".est");
}

std::string render_manifest(const Repository& repo) {
  std::ostringstream out;
  for (const auto& r : repo.releases) {
    out << "release " << r.number << "\n";
    for (const auto& [name, s] : r.schemas) out << "class " << name << " version " << s.version << "\n";
  }
  for (const auto& [cls, hs] : repo.handlers) {
    for (const auto& [key, h] : hs) {
      out << "transformer " << cls << " " << key.first << " " << key.second << " " << h.digest
          << "\n";
    }
  }
  return out.str();
}

Repository load_repository(const fs::path& dir) {
  Repository repo;
  repo.project_name = fs::absolute(dir).lexically_normal().filename().string();
  if (repo.project_name.empty()) repo.project_name = fs::absolute(dir).parent_path().filename().string();
  const fs::path manifest = dir / kManifest;
  if (!fs::is_regular_file(manifest)) io_error(manifest, "not an escher project");

  std::map<std::string, std::map<VersionPair, std::string>> digests;
  std::istringstream in(read_file(manifest));
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::vector<std::string> w;
    for (std::string tok; ls >> tok;) w.push_back(tok);
    if (w.empty()) continue;
    if (w[0] == "release" && w.size() == 2) {
      const int n = parse_positive(w[1], line);
      if (n != repo.latest_release() + 1) {
        manifest_error(line, "release numbers must increase by 1");
      }
      repo.releases.push_back(Release{n, {}});
    } else if (w[0] == "class" && w.size() == 4 && w[2] == "version") {
      if (repo.releases.empty()) manifest_error(line, "class entry before any release");
      Release& r = repo.releases.back();
      const int v = parse_positive(w[3], line);
      const fs::path file = dir / "releases" / std::to_string(r.number) / (w[1] + ".esc");
      ClassSchema s = parse_schema(read_file(file));
      if (s.name != w[1] || s.version != v) {
        manifest_error(line, file.string() + " holds " + s.name + " version " +
                                 std::to_string(s.version));
      }
      if (!r.schemas.emplace(w[1], std::move(s)).second) {
        manifest_error(line, "class " + w[1] + " listed twice in release " + std::to_string(r.number));
      }
    } else if (w[0] == "transformer" && w.size() == 5) {
      digests[w[1]][{parse_positive(w[2], line), parse_positive(w[3], line)}] = w[4];
    } else {
      manifest_error(line, "unrecognized entry '" + raw + "'");
    }
  }

  const fs::path hdir = dir / "handlers";
  if (fs::is_directory(hdir)) {
    static const std::regex kName(R"(([0-9]+)_to_([0-9]+)\.est)");
    std::vector<fs::path> files;
    for (const auto& cdir : fs::directory_iterator(hdir)) {
      if (!cdir.is_directory()) continue;
      for (const auto& f : fs::directory_iterator(cdir.path())) {
        if (f.is_regular_file() && std::regex_match(f.path().filename().string(), kName)) {
          files.push_back(f.path());
        }
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string cls = f.parent_path().filename().string();
      std::smatch m;
      const std::string fname = f.filename().string();
      std::regex_match(fname, m, kName);
      const int from = std::stoi(m[1]);
      const int to = std::stoi(m[2]);
      const std::string text = read_file(f);
      ObjectTransformer t = parse_transformer(text);
      if (t.class_name != cls || t.from_version != from || t.to_version != to) {
        throw Error(ErrorCode::InvalidTransformer, {cls},
                    f.string() + " declares " + t.class_name + " " + std::to_string(t.from_version) +
                        " to " + std::to_string(t.to_version));
      }
      repo = register_transformer(repo, t);
      auto& h = repo.handlers[cls][{from, to}];
      auto dc = digests.find(cls);
      if (dc != digests.end() && dc->second.count({from, to})) {
        h.digest = dc->second[{from, to}];
        dc->second.erase({from, to});
      } else {
        h.digest = sha256_hex(text);
      }
    }
  }
  for (const auto& [cls, rest] : digests) {
    for (const auto& [key, d] : rest) {
      io_error(handler_path(dir, cls, key.first, key.second), "listed in manifest but missing");
    }
  }
  return repo;
}

void save_repository(const Repository& repo, const fs::path& dir, bool overwrite_handlers) {
  for (const auto& [cls, hs] : repo.handlers) {
    for (const auto& [key, h] : hs) {
      const fs::path p = handler_path(dir, cls, key.first, key.second);
      if (fs::exists(p)) {
        if (parse_transformer(read_file(p)) == h.transformer) continue;
        if (!overwrite_handlers) {
          throw Error(ErrorCode::OverwriteRefused,
                      {cls, std::to_string(key.first), std::to_string(key.second)},
                      p.string() + " differs from the registered transformer");
        }
      }
      write_file(p, render_transformer(h.transformer));
    }
  }
  for (const auto& r : repo.releases) {
    for (const auto& [name, s] : r.schemas) {
      write_file(dir / "releases" / std::to_string(r.number) / (name + ".esc"), render_schema(s));
    }
  }
  write_file(dir / kManifest, render_manifest(repo));
}

bool handler_modified(const Repository& repo, const fs::path& dir, std::string_view class_name,
                      int from, int to) {
  auto it = repo.handlers.find(std::string(class_name));
  if (it == repo.handlers.end()) return false;
  auto h = it->second.find({from, to});
  if (h == it->second.end()) return false;
  const fs::path p = handler_path(dir, class_name, from, to);
  if (!fs::exists(p)) return false;
  return sha256_hex(read_file(p)) != h->second.digest;
}

}  // namespace escher
