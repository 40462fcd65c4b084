#include "escher/per.hpp"

#include <sstream>

#include "escher/error.hpp"

namespace escher {

namespace {

[[noreturn]] void hist_error(int line, std::string reason) {
  throw Error(ErrorCode::FormatError, {std::to_string(line)}, std::move(reason));
}

}  // namespace

void validate_history(const EvolutionHistory& h) {
  if (h.version_count < 1) {
    throw Error(ErrorCode::FormatError, {"0"}, h.class_name + ": version count must be positive");
  }
  for (const auto& [a, b] : h.edges) {
    if (a == b || a < 1 || b < 1 || a > h.version_count || b > h.version_count) {
      throw Error(ErrorCode::FormatError, {"0"},
                  h.class_name + ": bad edge " + std::to_string(a) + " -> " + std::to_string(b));
    }
  }
}

std::set<VersionPair> transitive_closure(int m, const std::set<VersionPair>& edges) {
  const auto n = static_cast<std::size_t>(m);
  std::vector<std::vector<char>> reach(n + 1, std::vector<char>(n + 1, 0));
  for (const auto& [a, b] : edges) reach[a][b] = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 1; i <= n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 1; j <= n; ++j) {
        if (reach[k][j]) reach[i][j] = 1;
      }
    }
  }
  std::set<VersionPair> out;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (i != j && reach[i][j]) out.emplace(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

Rational per_class(const EvolutionHistory& h) {
  validate_history(h);
  const std::int64_t m = h.version_count;
  if (m == 1) return Rational(1);
  const auto closure = transitive_closure(h.version_count, h.edges);
  return Rational(static_cast<std::int64_t>(closure.size()), m * (m - 1));
}

Rational per_version(const EvolutionHistory& h, int v) {
  validate_history(h);
  if (h.version_count == 1) throw Error(ErrorCode::DegenerateHistory, {h.class_name});
  if (v < 1 || v > h.version_count) {
    throw Error(ErrorCode::UnknownVersion, {h.class_name, std::to_string(v)});
  }
  std::int64_t touching = 0;
  for (const auto& [a, b] : transitive_closure(h.version_count, h.edges)) {
    if (a == v || b == v) ++touching;
  }
  return Rational(touching, 2 * (static_cast<std::int64_t>(h.version_count) - 1));
}

Rational per_release(const std::vector<EvolutionHistory>& histories) {
  if (histories.empty()) throw Error(ErrorCode::EmptyRelease, {});
  Rational sum(0);
  for (const auto& h : histories) sum += per_class(h);
  return sum / static_cast<std::int64_t>(histories.size());
}

EvolutionHistory history_from_repository(const Repository& repo, std::string_view class_name) {
  EvolutionHistory h;
  h.class_name = std::string(class_name);
  h.version_count = repo.latest_version(class_name);
  if (h.version_count == 0) throw Error(ErrorCode::UnknownClass, {h.class_name});
  if (auto it = repo.handlers.find(h.class_name); it != repo.handlers.end()) {
    for (const auto& [key, handler] : it->second) h.edges.insert(key);
  }
  return h;
}

std::vector<EvolutionHistory> parse_histories(std::string_view text) {
  std::vector<EvolutionHistory> out;
  bool have_versions = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  auto parse_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    hist_error(line, "expected an integer, found '" + s + "'");
  };
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::vector<std::string> w;
    for (std::string tok; ls >> tok;) w.push_back(tok);
    if (w.empty() || w[0].rfind("--", 0) == 0) continue;
    if (w[0] == "class" && w.size() == 2) {
      if (!out.empty() && !have_versions) hist_error(line, "class " + out.back().class_name + " has no versions line");
      out.push_back(EvolutionHistory{w[1], 1, {}});
      have_versions = false;
    } else if (w[0] == "versions" && w.size() == 2) {
      if (out.empty() || have_versions) hist_error(line, "unexpected versions line");
      out.back().version_count = parse_int(w[1]);
      if (out.back().version_count < 1) hist_error(line, "version count must be positive");
      have_versions = true;
    } else if (w[0] == "tf" && w.size() == 3) {
      if (!have_versions) hist_error(line, "tf before versions");
      const int a = parse_int(w[1]);
      const int b = parse_int(w[2]);
      const int m = out.back().version_count;
      if (a == b || a < 1 || b < 1 || a > m || b > m) {
        hist_error(line, "bad transformation " + w[1] + " -> " + w[2]);
      }
      out.back().edges.emplace(a, b);
    } else {
      hist_error(line, "unrecognized line '" + raw + "'");
    }
  }
  if (out.empty()) hist_error(line, "no class block");
  if (!have_versions) hist_error(line, "class " + out.back().class_name + " has no versions line");
  return out;
}

std::string render_history(const EvolutionHistory& h) {
  std::ostringstream out;
  out << "class " << h.class_name << "\nversions " << h.version_count << "\n";
  for (const auto& [a, b] : h.edges) out << "tf " << a << " " << b << "\n";
  return out.str();
}

std::string format_per(const Rational& r) {
  const std::int64_t hundredths = (r.numerator() * 200 + r.denominator()) / (2 * r.denominator());
  std::string frac = std::to_string(hundredths % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(hundredths / 100) + "." + frac;
}

std::string render_per_report(const std::vector<EvolutionHistory>& histories) {
  std::ostringstream out;
  for (const auto& h : histories) {
    out << "per " << h.class_name << " = " << format_per(per_class(h)) << "\n";
    if (h.version_count == 1) out << "note " << h.class_name << " has a single version\n";
  }
  out << "release per = " << format_per(per_release(histories)) << "\n";
  return out.str();
}

}  // namespace escher
