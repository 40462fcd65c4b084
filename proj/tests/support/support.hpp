#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "escher/object_graph.hpp"
#include "escher/schema.hpp"

namespace escher::testing {

inline std::string fixture(const std::string& name) {
  return std::string(ESCHER_FIXTURE_DIR) + "/" + name;
}

inline std::string golden(const std::string& name) {
  return std::string(ESCHER_GOLDEN_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("escher_test_" + name + "_" +
                                                     std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------
// Closure oracles
// ---------------------------------------------------------------------------

using Pair = std::pair<int, int>;

// Naive fixed point: keep composing pairs until nothing new appears.
inline std::set<Pair> naive_closure(const std::set<Pair>& edges) {
  std::set<Pair> r = edges;
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<Pair> add;
    for (const auto& [a, b] : r) {
      for (const auto& [c, d] : r) {
        if (b == c && a != d && !r.count({a, d})) add.emplace_back(a, d);
      }
    }
    for (const auto& p : add) grew |= r.insert(p).second;
  }
  return r;
}

// Depth-first reachability from each version.
inline std::size_t reachable_pairs(int m, const std::set<Pair>& edges) {
  std::size_t count = 0;
  for (int s = 1; s <= m; ++s) {
    std::vector<char> seen(m + 1, 0);
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [a, b] : edges) {
        if (a == v && !seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
      }
    }
    for (int t = 1; t <= m; ++t) count += (t != s && seen[t]);
  }
  return count;
}

// ---------------------------------------------------------------------------
// Random schemas
// ---------------------------------------------------------------------------

class SchemaGen {
 public:
  explicit SchemaGen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  TypePtr unmarked_type(const std::vector<std::string>& params, int depth = 0) {
    static const char* kClasses[] = {"INTEGER", "REAL", "STRING", "BOOLEAN", "PERSON", "ACCOUNT"};
    static const char* kContainers[] = {"LIST", "ARRAY", "TABLE"};
    const int roll = pick(10);
    if (roll < 5 || depth >= 2) return TypeExpr::class_type(kClasses[pick(6)]);
    if (roll < 7 && !params.empty()) return TypeExpr::param(params[pick(static_cast<int>(params.size()))]);
    const std::string c = kContainers[pick(3)];
    TypePtr t = TypeExpr::derivation(TypeExpr::class_type(c), any_type(params, depth + 1));
    if (c == "TABLE") t = TypeExpr::derivation(t, any_type(params, depth + 1));
    return t;
  }

  TypePtr any_type(const std::vector<std::string>& params, int depth = 0) {
    TypePtr t = unmarked_type(params, depth);
    const int roll = pick(6);
    if (roll == 0) return TypeExpr::attached(t);
    if (roll == 1) return TypeExpr::detachable(t);
    return t;
  }

  std::string fresh_name(const std::set<std::string>& used) {
    static const char* kNames[] = {"owner", "balance", "info", "items", "count", "rate",
                                   "label", "next", "prev", "limit", "total", "flag",
                                   "key", "value", "size", "name", "data", "left",
                                   "right", "parent", "child", "stamp", "code", "note"};
    for (;;) {
      std::string n = kNames[pick(24)];
      if (!used.count(n)) return n;
      n += std::to_string(pick(100));
      if (!used.count(n)) return n;
    }
  }

  ClassSchema schema(int max_attributes = 12) {
    ClassSchema s;
    s.name = "SAMPLE";
    static const std::vector<std::vector<std::string>> kParams = {{}, {"G"}, {"G", "H"}, {"K1"}};
    s.generic_params = kParams[pick(4)];
    const int n = pick(max_attributes + 1);
    std::set<std::string> used;
    for (int i = 0; i < n; ++i) {
      std::string name = fresh_name(used);
      used.insert(name);
      s.attributes.push_back(Attribute{name, any_type(s.generic_params)});
    }
    return s;
  }

  // A new version of `old`: kept, retyped, attached, detached, renamed and
  // removed attributes plus additions, optionally reordered.
  ClassSchema evolve(const ClassSchema& old, int max_attributes = 12) {
    ClassSchema s;
    s.name = old.name;
    s.generic_params = old.generic_params;
    s.version = old.version + 1;
    std::set<std::string> used;
    for (const auto& a : old.attributes) used.insert(a.name);
    for (const auto& a : old.attributes) {
      const int roll = pick(10);
      if (roll < 4) {
        s.attributes.push_back(a);
      } else if (roll == 4) {
        s.attributes.push_back(Attribute{a.name, any_type(s.generic_params)});
      } else if (roll == 5) {
        s.attributes.push_back(Attribute{a.name, TypeExpr::attached(strip_markers(a.type))});
      } else if (roll == 6) {
        s.attributes.push_back(Attribute{a.name, TypeExpr::detachable(strip_markers(a.type))});
      } else if (roll == 7) {
        std::string n = fresh_name(used);
        used.insert(n);
        s.attributes.push_back(Attribute{n, a.type});
      }
      // else removed
    }
    const int extra = pick(4);
    for (int i = 0; i < extra && static_cast<int>(s.attributes.size()) < max_attributes; ++i) {
      std::string n = fresh_name(used);
      used.insert(n);
      s.attributes.push_back(Attribute{n, any_type(s.generic_params)});
    }
    if (chance(0.3)) std::shuffle(s.attributes.begin(), s.attributes.end(), rng_);
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

// Order-insensitive (name, type) comparison with detachable markers
// stripped on both sides, written independently of the library's helpers.
inline std::set<std::pair<std::string, std::string>> attribute_set(const ClassSchema& s) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& a : s.attributes) {
    std::string t = render_type(a.type);
    for (std::size_t p; (p = t.find("detachable ")) != std::string::npos;) t.erase(p, 11);
    out.emplace(a.name, t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random object graphs
// ---------------------------------------------------------------------------

class GraphGen {
 public:
  explicit GraphGen(std::uint64_t seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  double real() {
    for (;;) {
      std::uint64_t bits = rng_();
      double d;
      std::memcpy(&d, &bits, sizeof d);
      if (std::isfinite(d)) {
        switch (pick(4)) {
          case 0: return d;
          case 1: return static_cast<double>(static_cast<std::int32_t>(rng_())) / 8.0;
          case 2: return std::ldexp(1.0, pick(200) - 100);
          default: return 0.1 * pick(1000);
        }
      }
    }
  }

  std::string text() {
    static const std::vector<std::string> kPieces = {"a", "Z", " ", "\"", "\\", "\n", "--",
                                                     "obj", "end", "\xc3\xa9", "\xe2\x82\xac", "42"};
    std::string s;
    const int n = pick(8);
    for (int i = 0; i < n; ++i) s += kPieces[pick(static_cast<int>(kPieces.size()))];
    return s;
  }

  ObjectGraph graph(int max_records = 20) {
    static const char* kClasses[] = {"NODE", "BANK_ACCOUNT", "PERSON", "TREE"};
    static const char* kFields[] = {"a", "b", "next", "info", "val", "owner", "x1"};
    ObjectGraph g;
    const int n = 1 + pick(max_records);
    for (int i = 0; i < n; ++i) {
      ObjectRecord r;
      r.id = static_cast<std::uint64_t>(i);
      r.class_name = kClasses[pick(4)];
      r.version = 1 + pick(5);
      const int nf = pick(6);
      std::set<std::string> used;
      for (int k = 0; k < nf; ++k) {
        std::string name = kFields[pick(7)];
        if (!used.insert(name).second) continue;
        Field f;
        f.name = name;
        switch (pick(8)) {
          case 0: {
            const std::int64_t v = static_cast<std::int64_t>(rng_());
            f.type = TypeExpr::class_type("INTEGER");
            f.value = IntVal{pick(3) == 0 ? v : v % 1000};
            break;
          }
          case 1:
            f.type = TypeExpr::class_type("REAL");
            f.value = RealVal{real()};
            break;
          case 2:
            f.type = TypeExpr::class_type("BOOLEAN");
            f.value = BoolVal{pick(2) == 0};
            break;
          case 3:
            f.type = TypeExpr::attached(TypeExpr::class_type("STRING"));
            f.value = StringVal{text()};
            break;
          case 4:
            f.type = TypeExpr::detachable(TypeExpr::class_type("PERSON"));
            f.value = VoidVal{};
            break;
          case 5:
            f.type = TypeExpr::derivation(TypeExpr::derivation(TypeExpr::class_type("TABLE"),
                                                               TypeExpr::param("K")),
                                          TypeExpr::class_type("STRING"));
            f.value = RefVal{static_cast<std::uint64_t>(pick(n))};
            break;
          default:
            f.type = TypeExpr::class_type(kClasses[pick(4)]);
            f.value = RefVal{static_cast<std::uint64_t>(pick(n))};
            break;
        }
        r.fields.push_back(std::move(f));
      }
      g.records.push_back(std::move(r));
    }
    return g;
  }

 private:
  std::mt19937_64 rng_;
};

// Adjacency of RefVal edges: (record id, field name) -> target id.
inline std::map<std::pair<std::uint64_t, std::string>, std::uint64_t> ref_edges(const ObjectGraph& g) {
  std::map<std::pair<std::uint64_t, std::string>, std::uint64_t> out;
  for (const auto& r : g.records) {
    for (const auto& f : r.fields) {
      if (const auto* ref = std::get_if<RefVal>(&f.value)) out[{r.id, f.name}] = ref->id;
    }
  }
  return out;
}

}  // namespace escher::testing
