#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "escher/repository.hpp"

namespace escher {

using Rational = boost::rational<std::int64_t>;

struct EvolutionHistory {
  std::string class_name;
  int version_count = 1;
  std::set<VersionPair> edges;  // (from, to): a transformer exists from -> to
};

// Throws FormatError on self-loops or versions outside 1..m.
void validate_history(const EvolutionHistory& h);

// Directed reachability over versions 1..m, without self pairs.
std::set<VersionPair> transitive_closure(int version_count, const std::set<VersionPair>& edges);

// |closure| / m(m-1); 1 when m == 1.
Rational per_class(const EvolutionHistory& h);

// Closure pairs touching v over 2(m-1). Throws DegenerateHistory or
// UnknownVersion.
Rational per_version(const EvolutionHistory& h, int v);

// Unweighted mean of per_class. Throws EmptyRelease.
Rational per_release(const std::vector<EvolutionHistory>& histories);

// m = latest version tag, edges = registered transformers. Throws
// UnknownClass.
EvolutionHistory history_from_repository(const Repository& repo, std::string_view class_name);

// `.hist` text: one or more blocks of
//
//   class ArrayList
//   versions 5
//   tf 1 2
//
// Throws FormatError(line, reason).
std::vector<EvolutionHistory> parse_histories(std::string_view text);
std::string render_history(const EvolutionHistory& h);

// Two decimals, halves rounded up: 17/40 -> "0.43".
std::string format_per(const Rational& r);

// `per <class> = 0.xx` per history, then `release per = 0.xx`. Single-version
// classes are followed by a `note` line.
std::string render_per_report(const std::vector<EvolutionHistory>& histories);

}  // namespace escher
