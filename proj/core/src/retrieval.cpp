#include "escher/retrieval.hpp"

#include <deque>

#include "escher/error.hpp"

namespace escher {

std::optional<std::vector<int>> migration_path(const Repository& repo, std::string_view class_name,
                                               int from, int to, bool strict_direct) {
  if (from == to) return std::vector<int>{from};
  auto it = repo.handlers.find(std::string(class_name));
  if (it == repo.handlers.end()) return std::nullopt;
  const auto& hs = it->second;
  if (hs.count({from, to})) return std::vector<int>{from, to};
  if (strict_direct) return std::nullopt;

  // Hop distance to `to` along reversed edges, then a greedy walk that always
  // takes the smallest successor still on a shortest path.
  std::map<int, std::vector<int>> preds;
  std::map<int, std::vector<int>> succs;
  for (const auto& [key, h] : hs) {
    preds[key.second].push_back(key.first);
    succs[key.first].push_back(key.second);
  }
  std::map<int, int> dist{{to, 0}};
  std::deque<int> queue{to};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int p : preds[v]) {
      if (dist.emplace(p, dist[v] + 1).second) queue.push_back(p);
    }
  }
  if (!dist.count(from)) return std::nullopt;
  std::vector<int> path{from};
  int v = from;
  while (v != to) {
    int best = 0;
    bool found = false;
    for (int w : succs[v]) {  // ascending: handler map keys are ordered
      auto d = dist.find(w);
      if (d != dist.end() && d->second == dist[v] - 1) {
        best = w;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
    path.push_back(best);
    v = best;
  }
  return path;
}

ObjectGraph retrieve(const ObjectGraph& graph, const Repository& repo,
                     const std::map<std::string, int>& target_versions, const RetrieveInputs& inputs,
                     const RetrieveOptions& options, std::vector<std::string>* warnings,
                     const ConverterRegistry& registry) {
  validate_graph(graph);
  InterpretOptions iopts;
  iopts.check_attachment = options.check_assertions;

  ObjectGraph out;
  out.records.reserve(graph.records.size());
  for (const auto& record : graph.records) {
    const std::string& cls = record.class_name;
    int target = 0;
    if (auto t = target_versions.find(cls); t != target_versions.end()) {
      target = t->second;
    } else {
      target = repo.latest_version(cls);
      if (target == 0) throw Error(ErrorCode::UnknownClass, {cls});
    }
    const ClassSchema* target_schema = repo.schema(cls, target);
    if (!target_schema) throw Error(ErrorCode::UnknownVersion, {cls, std::to_string(target)});

    ObjectRecord current = record;
    if (current.version != target) {
      if (!repo.has_handler(cls)) throw Error(ErrorCode::HandlerMissing, {cls});
      auto path = migration_path(repo, cls, current.version, target, options.strict_direct);
      if (!path) {
        throw Error(ErrorCode::TransformationMissing,
                    {cls, std::to_string(current.version), std::to_string(target)});
      }
      InputMap class_inputs;
      for (const auto& [key, value] : inputs) {
        if (key.first == cls) class_inputs[key.second] = value;
      }
      for (std::size_t i = 1; i < path->size(); ++i) {
        const int from = (*path)[i - 1];
        const int to = (*path)[i];
        const ClassSchema* step_schema = repo.schema(cls, to);
        if (!step_schema) throw Error(ErrorCode::UnknownVersion, {cls, std::to_string(to)});
        current = interpret_transformer(*repo.transformer(cls, from, to), current, class_inputs,
                                        registry, *step_schema, iopts, warnings);
      }
    }
    if (options.check_assertions) {
      const InvariantResult r = eval_invariant(current, *target_schema);
      if (!r.pass) {
        throw Error(ErrorCode::InvariantViolation,
                    {cls, std::to_string(current.id), r.failed_clause});
      }
    }
    out.records.push_back(std::move(current));
  }
  return out;
}

}  // namespace escher
