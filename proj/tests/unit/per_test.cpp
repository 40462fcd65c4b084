#include <gtest/gtest.h>

#include "escher/error.hpp"
#include "escher/per.hpp"
#include "escher/smo.hpp"
#include "support.hpp"

using namespace escher;
using escher::testing::fixture;
using escher::testing::naive_closure;
using escher::testing::reachable_pairs;
using escher::testing::slurp;

namespace {

EvolutionHistory H(int m, std::set<VersionPair> edges) { return {"X", m, std::move(edges)}; }

std::set<VersionPair> complete(int m) {
  std::set<VersionPair> e;
  for (int a = 1; a <= m; ++a) {
    for (int b = 1; b <= m; ++b) {
      if (a != b) e.emplace(a, b);
    }
  }
  return e;
}

std::set<VersionPair> chain(int m) {
  std::set<VersionPair> e;
  for (int i = 1; i < m; ++i) e.emplace(i, i + 1);
  return e;
}

}  // namespace

TEST(Per, WorkedExamples) {
  EXPECT_EQ(per_class(H(2, {{1, 2}})), Rational(1, 2));
  EXPECT_EQ(per_class(H(5, chain(5))), Rational(1, 2));
  EXPECT_EQ(transitive_closure(5, chain(5)).size(), 10u);
  for (int m = 2; m <= 6; ++m) {
    EXPECT_EQ(per_class(H(m, complete(m))), Rational(1));
    EXPECT_EQ(per_class(H(m, {})), Rational(0));
  }
  EXPECT_EQ(per_class(H(1, {})), Rational(1));
}

TEST(Per, ArrayListFixture) {
  const auto hs = parse_histories(slurp(fixture("arraylist.hist")));
  ASSERT_EQ(hs.size(), 1u);
  EXPECT_EQ(hs[0].class_name, "ArrayList");
  EXPECT_EQ(transitive_closure(5, hs[0].edges), hs[0].edges);
  EXPECT_EQ(per_class(hs[0]), Rational(1, 5));
  EXPECT_EQ(format_per(per_class(hs[0])), "0.20");
  EXPECT_EQ(per_version(hs[0], 5), Rational(0));
}

TEST(Per, VersionGranularity) {
  EXPECT_EQ(per_version(H(2, {{1, 2}}), 1), Rational(1, 2));
  EXPECT_EQ(per_version(H(4, complete(4)), 3), Rational(1));
  try {
    per_version(H(1, {}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateHistory);
  }
  EXPECT_THROW(per_version(H(3, {}), 4), Error);
}

TEST(Per, ReleaseMean) {
  EXPECT_EQ(per_release({H(2, {}), H(2, complete(2))}), Rational(1, 2));
  EXPECT_EQ(per_release({H(5, chain(5))}), Rational(1, 2));
  try {
    per_release({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyRelease);
  }
}

TEST(Per, JavaUtilFixturePerClass) {
  const std::map<std::string, std::string> expected = {
      {"ArrayList", "0.20"}, {"BitSet", "0.40"}, {"Calendar", "0.25"}, {"Currency", "0.70"},
      {"Date", "0.30"}, {"EnumMap", "1.00"}, {"EnumSet", "1.00"}, {"EventObject", "0.70"},
      {"HashMap", "0.10"}, {"HashSet", "0.30"}, {"HashTable", "0.30"}, {"IdentityHashMap", "0.40"},
      {"LinkedHashSet", "0.40"}, {"LinkedList", "0.40"}, {"Locale", "0.20"},
      {"PriorityQueue", "1.00"}, {"Random", "0.15"}, {"TimeZone", "0.30"}, {"TreeMap", "0.20"},
      {"TreeSet", "0.35"}, {"UUID", "1.00"}, {"Vector", "1.00"}};
  const auto hs = parse_histories(slurp(fixture("java_util.hist")));
  ASSERT_EQ(hs.size(), 22u);
  for (const auto& h : hs) EXPECT_EQ(format_per(per_class(h)), expected.at(h.class_name)) << h.class_name;
  const Rational mean = per_release(hs);
  EXPECT_NEAR(boost::rational_cast<double>(mean), 0.48, 0.005);
  EXPECT_EQ(format_per(mean), "0.48");
}

TEST(Per, Formatting) {
  EXPECT_EQ(format_per(Rational(17, 40)), "0.43");
  EXPECT_EQ(format_per(Rational(1)), "1.00");
  EXPECT_EQ(format_per(Rational(0)), "0.00");
  EXPECT_EQ(format_per(Rational(1, 3)), "0.33");
  EXPECT_EQ(render_per_report({H(2, {{1, 2}})}), "per X = 0.50\nrelease per = 0.50\n");
  EXPECT_EQ(render_per_report({H(1, {})}), "per X = 1.00\nnote X has a single version\nrelease per = 1.00\n");
}

TEST(Per, HistParsingErrors) {
  for (const char* bad : {"", "versions 3\n", "class A\ntf 1 2\n", "class A\nversions 2\ntf 1 1\n",
                          "class A\nversions 2\ntf 1 3\n", "class A\nversions x\n", "class A\nversions 2\nbogus\n",
                          "class A\nclass B\nversions 1\n"}) {
    try {
      parse_histories(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::FormatError) << bad;
    }
  }
  const auto hs = parse_histories("-- two\nclass A\nversions 1\n\nclass B\nversions 3\ntf 3 1\n");
  ASSERT_EQ(hs.size(), 2u);
  EXPECT_EQ(render_history(hs[1]), "class B\nversions 3\ntf 3 1\n");
}

TEST(Per, HistoryFromRepository) {
  Repository repo = release(Repository{}, {{"A", parse_schema("class A feature x: INTEGER end")}});
  EXPECT_EQ(per_class(history_from_repository(repo, "A")), Rational(1));
  repo = release(repo, {{"A", parse_schema("version 2 class A feature x: REAL end")}});
  const EvolutionHistory h = history_from_repository(repo, "A");
  EXPECT_EQ(h.version_count, 2);
  EXPECT_EQ(per_class(h), Rational(1, 2));
  repo = register_transformer(repo, generate_transformer(diff_schemas(
                                        parse_schema("version 2 class A feature x: REAL end"),
                                        parse_schema("class A feature x: INTEGER end"))));
  EXPECT_EQ(per_class(history_from_repository(repo, "A")), Rational(1));
  EXPECT_THROW(history_from_repository(repo, "B"), Error);
}

TEST(Property, ClosureMatchesOracles) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    const int m = 1 + static_cast<int>(rng() % 6);
    std::set<VersionPair> e;
    for (const auto& p : complete(m)) {
      if (rng() % 3 == 0) e.insert(p);
    }
    const auto c = transitive_closure(m, e);
    EXPECT_EQ(c, naive_closure(e));
    EXPECT_EQ(c.size(), reachable_pairs(m, e));
    EXPECT_EQ(transitive_closure(m, c), c);
    const Rational p = per_class(H(m, e));
    EXPECT_GE(p, Rational(0));
    EXPECT_LE(p, Rational(1));
    if (m >= 2) EXPECT_EQ(p == Rational(1), c == complete(m));
    // Monotonicity: adding any missing pair never lowers the metric.
    for (const auto& q : complete(m)) {
      if (e.count(q)) continue;
      auto more = e;
      more.insert(q);
      EXPECT_GE(per_class(H(m, more)), p);
      if (m >= 2) EXPECT_GE(per_version(H(m, more), q.first), per_version(H(m, e), q.first));
      break;
    }
  }
}

TEST(Property, ChainLaw) {
  for (int m = 2; m <= 12; ++m) {
    EXPECT_EQ(per_class(H(m, chain(m))), Rational(1, 2));
    EXPECT_EQ(reachable_pairs(m, chain(m)), static_cast<std::size_t>(m * (m - 1) / 2));
  }
}
