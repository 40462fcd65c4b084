#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "escher/error.hpp"
#include "escher/per.hpp"
#include "escher/repository.hpp"
#include "escher/retrieval.hpp"
#include "escher/smo.hpp"

namespace escher::cli {

namespace fs = std::filesystem;

namespace {

struct Usage {
  std::string message;
};

struct Config {
  std::string project;
  std::string format = "text";
  bool no_assert = false;
  bool strict_direct = false;

  bool machine() const { return format == "machine"; }
};

class Runner {
 public:
  Runner(const Config& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  void warn(const std::string& w) const {
    if (!cfg_.machine()) err_ << "warning: " << w << "\n";
  }

  fs::path project_dir() const {
    if (cfg_.project.empty()) throw Usage{"this command needs --project"};
    return cfg_.project;
  }

  // A schema argument is a file path, or NAME@v naming a released version
  // when a project is given.
  ClassSchema load_schema(const std::string& arg) const {
    static const std::regex kRef(R"(([A-Za-z_][A-Za-z0-9_]*)@([0-9]+))");
    std::smatch m;
    if (!cfg_.project.empty() && !fs::exists(arg) && std::regex_match(arg, m, kRef)) {
      const Repository repo = load_repository(cfg_.project);
      const ClassSchema* s = repo.schema(m[1].str(), std::stoi(m[2]));
      if (!s) throw Error(ErrorCode::UnknownVersion, {m[1].str(), m[2].str()});
      return *s;
    }
    return parse_schema(read_file(arg));
  }

  int parse(const std::string& file) {
    out_ << render_schema(parse_schema(read_file(file)));
    return 0;
  }

  int diff(const std::string& old_file, const std::string& new_file) {
    const ClassTransformation t = diff_schemas(load_schema(old_file), load_schema(new_file));
    out_ << render_report(t);
    for (const auto& n : t.notes) out_ << "note " << n << "\n";
    return 0;
  }

  int gen(const std::string& old_file, const std::string& new_file, const std::string& out_file,
          bool force) {
    const ClassTransformation diff = diff_schemas(load_schema(old_file), load_schema(new_file));
    const ObjectTransformer t = generate_transformer(diff);
    for (const auto& w : t.warnings()) warn(w);
    const std::string text = render_transformer(t);
    if (!out_file.empty()) {
      write_file(out_file, text);
      return 0;
    }
    if (cfg_.project.empty()) {
      out_ << text;
      return 0;
    }
    const fs::path dir = project_dir();
    RepositoryLock lock(dir);
    const Repository repo = register_transformer(load_repository(dir), t, force);
    save_repository(repo, dir, force);
    out_ << "registered " << handler_path(dir, t.class_name, t.from_version, t.to_version).string()
         << "\n";
    return 0;
  }

  int release(const std::string& working_dir) {
    const fs::path work = working_dir.empty() ? fs::path(".") : fs::path(working_dir);
    const fs::path dir = cfg_.project.empty() ? work : fs::path(cfg_.project);
    if (!fs::is_directory(work)) throw Error(ErrorCode::IoError, {work.string()}, "not a directory");
    std::error_code ec;
    fs::create_directories(dir, ec);

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(work)) {
      if (e.is_regular_file() && e.path().extension() == ".esc") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, ClassSchema> working_set;
    std::map<std::string, fs::path> origin;
    for (const auto& f : files) {
      ClassSchema s = parse_schema(read_file(f));
      if (origin.count(s.name)) {
        throw Error(ErrorCode::FormatError, {"0"},
                    "class " + s.name + " defined in both " + origin[s.name].string() + " and " +
                        f.string());
      }
      origin[s.name] = f;
      working_set.emplace(s.name, std::move(s));
    }

    RepositoryLock lock(dir);
    Repository repo;
    if (is_project(dir)) {
      repo = load_repository(dir);
    } else {
      repo.project_name = fs::absolute(dir).lexically_normal().filename().string();
    }
    ReleaseReport report;
    const Repository next = escher::release(repo, working_set, &report);
    if (!report.no_op) {
      save_repository(next, dir);
      for (const auto& [name, file] : origin) {
        const int v = next.latest_version(name);
        if (working_set.at(name).version != v) write_file(file, with_version_header(read_file(file), v));
      }
    }
    out_ << render_release_report(report);
    return 0;
  }

  int migrate(const std::string& object_file, std::optional<int> to_release,
              const std::vector<std::string>& to, const std::vector<std::string>& input_args,
              const std::string& out_file) {
    const fs::path dir = project_dir();
    RepositoryLock lock(dir);
    const Repository repo = load_repository(dir);

    std::map<std::string, int> targets;
    if (to_release) {
      const Release* r = repo.release(*to_release);
      if (!r) throw Error(ErrorCode::UnknownVersion, {"release", std::to_string(*to_release)});
      for (const auto& [name, s] : r->schemas) targets[name] = s.version;
    }
    for (const auto& spec : to) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) throw Usage{"--to expects CLASS=version, got " + spec};
      try {
        targets[spec.substr(0, eq)] = std::stoi(spec.substr(eq + 1));
      } catch (const std::exception&) {
        throw Usage{"--to expects CLASS=version, got " + spec};
      }
    }
    RetrieveInputs inputs;
    for (const auto& spec : input_args) {
      const auto eq = spec.find('=');
      const auto dot = spec.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot == 0 || dot + 1 >= eq) {
        throw Usage{"--inputs expects CLASS.attr=value, got " + spec};
      }
      inputs[{spec.substr(0, dot), spec.substr(dot + 1, eq - dot - 1)}] =
          parse_value(spec.substr(eq + 1));
    }

    RetrieveOptions opts;
    opts.check_assertions = !cfg_.no_assert;
    opts.strict_direct = cfg_.strict_direct;
    std::vector<std::string> warnings;
    const ObjectGraph result =
        retrieve(deserialize(read_file(object_file)), repo, targets, inputs, opts, &warnings);
    for (const auto& w : warnings) warn(w);
    const std::string text = serialize(result);
    if (out_file.empty()) {
      out_ << text;
    } else {
      write_file(out_file, text);
    }
    return 0;
  }

  int per(const std::string& hist_file) {
    std::vector<EvolutionHistory> histories;
    if (!hist_file.empty()) {
      if (!cfg_.project.empty()) throw Usage{"per takes a history file or --project, not both"};
      histories = parse_histories(read_file(hist_file));
    } else {
      const Repository repo = load_repository(project_dir());
      for (const auto& name : repo.class_names()) {
        histories.push_back(history_from_repository(repo, name));
      }
    }
    out_ << render_per_report(histories);
    return 0;
  }

  int check(const std::string& object_file, const std::string& schema_file) {
    const ClassSchema schema = load_schema(schema_file);
    const ObjectGraph graph = deserialize(read_file(object_file));
    for (const auto& r : graph.records) {
      if (r.class_name != schema.name) continue;
      if (r.version != schema.version) {
        throw Error(ErrorCode::UnknownVersion, {r.class_name, std::to_string(r.version)},
                    "record " + std::to_string(r.id) + " does not match the schema version");
      }
      const InvariantResult res = eval_invariant(r, schema);
      if (!res.pass) {
        throw Error(ErrorCode::InvariantViolation,
                    {r.class_name, std::to_string(r.id), res.failed_clause});
      }
      out_ << "ok " << r.class_name << " " << r.id << "\n";
    }
    return 0;
  }

 private:
  static std::string with_version_header(const std::string& text, int v) {
    static const std::regex kHeader(R"(^(\s*(?:--[^\n]*\n\s*)*)version\s+[0-9]+)");
    std::smatch m;
    if (std::regex_search(text, m, kHeader)) {
      return m[1].str() + "version " + std::to_string(v) + text.substr(m.length(0));
    }
    return "version " + std::to_string(v) + "\n" + text;
  }

  const Config& cfg_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schema evolution toolkit for versioned object stores", "escher"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  app.add_option("--project", cfg.project, "Project directory");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "machine"}));
  app.add_flag("--no-assert", cfg.no_assert, "Skip invariant and attachment checks");
  app.add_flag("--strict-direct", cfg.strict_direct, "Only use direct transformers");

  std::string a, b, c;
  bool force = false;
  std::optional<int> to_release;
  std::vector<std::string> to, inputs;

  auto* parse = app.add_subcommand("parse", "Parse a schema and print its canonical form");
  parse->add_option("file", a)->required();

  auto* diff = app.add_subcommand("diff", "List the SMOs between two schema versions");
  diff->add_option("old", a)->required();
  diff->add_option("new", b)->required();

  auto* gen = app.add_subcommand("gen", "Generate an object transformer");
  gen->add_option("old", a)->required();
  gen->add_option("new", b)->required();
  gen->add_option("out", c);
  gen->add_flag("--force", force, "Replace an existing transformer");

  auto* rel = app.add_subcommand("release", "Release the working set of schemas");
  rel->add_option("working_dir", a);

  auto* mig = app.add_subcommand("migrate", "Migrate an object file");
  mig->add_option("object_file", a)->required();
  auto* to_rel = mig->add_option("--to-release", to_release, "Target release");
  auto* to_opt = mig->add_option("--to", to, "Target version, CLASS=v");
  to_rel->excludes(to_opt);
  mig->add_option("--inputs", inputs, "Input values, CLASS.attr=value");
  mig->add_option("--out", c, "Output object file");

  auto* per = app.add_subcommand("per", "Report p-evolution-robustness");
  per->add_option("hist_file", a);

  auto* chk = app.add_subcommand("check", "Check records against a schema invariant");
  chk->add_option("object_file", a)->required();
  chk->add_option("schema_file", b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Runner runner(cfg, out, err);
  try {
    if (parse->parsed()) return runner.parse(a);
    if (diff->parsed()) return runner.diff(a, b);
    if (gen->parsed()) return runner.gen(a, b, c, force);
    if (rel->parsed()) return runner.release(a);
    if (mig->parsed()) return runner.migrate(a, to_release, to, inputs, c);
    if (per->parsed()) return runner.per(a);
    if (chk->parsed()) return runner.check(a, b);
  } catch (const Usage& u) {
    err << "usage: " << u.message << "\n";
    return 2;
  } catch (const Error& e) {
    out << e.summary() << "\n";
    if (!cfg.machine() && !e.detail().empty()) err << "error: " << e.detail() << "\n";
    return e.code() == ErrorCode::IoError ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    out << "IoError " << e.path1().string() << "\n";
    if (!cfg.machine()) err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace escher::cli
