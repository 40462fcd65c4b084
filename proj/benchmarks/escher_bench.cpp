#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <string>

#include "escher/object_graph.hpp"
#include "escher/per.hpp"
#include "escher/repository.hpp"
#include "escher/retrieval.hpp"
#include "escher/smo.hpp"
#include "escher/transformer.hpp"

using namespace escher;

namespace {

std::set<VersionPair> random_edges(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<VersionPair> e;
  for (int a = 1; a <= m; ++a) {
    for (int b = 1; b <= m; ++b) {
      if (a != b && rng() % 4 == 0) e.emplace(a, b);
    }
  }
  return e;
}

ClassSchema wide_schema(int n, int version, bool real) {
  std::string src = "version " + std::to_string(version) + " class W feature\n";
  for (int i = 0; i < n; ++i) {
    src += "  a" + std::to_string(i) + ": " + (real && i % 2 ? "REAL" : "INTEGER") + "\n";
  }
  src += "end\n";
  return parse_schema(src);
}

ObjectGraph wide_graph(int records, int n) {
  ObjectGraph g;
  const TypePtr integer = parse_type("INTEGER");
  for (int r = 0; r < records; ++r) {
    ObjectRecord rec{static_cast<std::uint64_t>(r), "W", 1, {}};
    for (int i = 0; i < n; ++i) rec.fields.push_back({"a" + std::to_string(i), integer, IntVal{r + i}});
    g.records.push_back(std::move(rec));
  }
  return g;
}

}  // namespace

static void BM_Closure(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto edges = random_edges(m, 1);
  for (auto _ : state) benchmark::DoNotOptimize(transitive_closure(m, edges));
}
BENCHMARK(BM_Closure)->Arg(6)->Arg(16)->Arg(64);

static void BM_Diff(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ClassSchema a = wide_schema(n, 1, false);
  const ClassSchema b = wide_schema(n, 2, true);
  for (auto _ : state) benchmark::DoNotOptimize(diff_schemas(a, b));
}
BENCHMARK(BM_Diff)->Arg(12)->Arg(100);

static void BM_SerializeRoundTrip(benchmark::State& state) {
  const ObjectGraph g = wide_graph(static_cast<int>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(deserialize(serialize(g)));
}
BENCHMARK(BM_SerializeRoundTrip)->Arg(10)->Arg(1000);

static void BM_Retrieve(benchmark::State& state) {
  const int n = 8;
  Repository repo = release(Repository{}, {{"W", wide_schema(n, 1, false)}});
  repo = release(repo, {{"W", wide_schema(n, 2, true)}});
  const ObjectGraph g = wide_graph(static_cast<int>(state.range(0)), n);
  for (auto _ : state) benchmark::DoNotOptimize(retrieve(g, repo, {{"W", 2}}, {}));
}
BENCHMARK(BM_Retrieve)->Arg(10)->Arg(1000);
BENCHMARK_MAIN();
