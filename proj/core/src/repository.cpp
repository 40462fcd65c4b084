#include "escher/repository.hpp"

#include <openssl/evp.h>

#include <sstream>

#include "escher/error.hpp"
#include "escher/expr.hpp"
#include "escher/smo.hpp"

namespace escher {

bool operator==(const Release& a, const Release& b) {
  return a.number == b.number && a.schemas == b.schemas;
}

bool operator==(const Repository& a, const Repository& b) {
  if (a.project_name != b.project_name || a.releases != b.releases) return false;
  if (a.handlers.size() != b.handlers.size()) return false;
  for (auto ia = a.handlers.begin(), ib = b.handlers.begin(); ia != a.handlers.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.size() != ib->second.size()) return false;
    for (auto ha = ia->second.begin(), hb = ib->second.begin(); ha != ia->second.end(); ++ha, ++hb) {
      if (ha->first != hb->first || !(ha->second.transformer == hb->second.transformer) ||
          ha->second.digest != hb->second.digest) {
        return false;
      }
    }
  }
  return true;
}

const Release* Repository::release(int number) const {
  for (const auto& r : releases) {
    if (r.number == number) return &r;
  }
  return nullptr;
}

int Repository::latest_version(std::string_view class_name) const {
  int v = 0;
  for (const auto& r : releases) {
    auto it = r.schemas.find(std::string(class_name));
    if (it != r.schemas.end()) v = std::max(v, it->second.version);
  }
  return v;
}

const ClassSchema* Repository::schema(std::string_view class_name, int version) const {
  for (auto r = releases.rbegin(); r != releases.rend(); ++r) {
    auto it = r->schemas.find(std::string(class_name));
    if (it != r->schemas.end() && it->second.version == version) return &it->second;
  }
  return nullptr;
}

const ClassSchema* Repository::latest_schema(std::string_view class_name) const {
  const int v = latest_version(class_name);
  return v == 0 ? nullptr : schema(class_name, v);
}

std::set<std::string> Repository::class_names() const {
  std::set<std::string> out;
  for (const auto& r : releases) {
    for (const auto& [name, s] : r.schemas) out.insert(name);
  }
  return out;
}

bool Repository::has_handler(std::string_view class_name) const {
  auto it = handlers.find(std::string(class_name));
  return it != handlers.end() && !it->second.empty();
}

const ObjectTransformer* Repository::transformer(std::string_view class_name, int from,
                                                 int to) const {
  auto it = handlers.find(std::string(class_name));
  if (it == handlers.end()) return nullptr;
  auto h = it->second.find({from, to});
  return h == it->second.end() ? nullptr : &h->second.transformer;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, {"sha256"}, "digest computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

std::string render_release_report(const ReleaseReport& report) {
  if (report.no_op) return "no-op\n";
  std::ostringstream out;
  out << "release " << report.release_number << "\n";
  for (const auto& e : report.classes) {
    out << "class " << e.class_name << " version " << e.version << " "
        << (e.status == ClassStatus::New ? "new"
            : e.status == ClassStatus::Changed ? "changed"
                                               : "unchanged")
        << "\n";
  }
  for (const auto& [cls, pair] : report.stubs) {
    out << "stub " << cls << " " << pair.first << " " << pair.second << "\n";
  }
  for (const auto& n : report.notes) out << "note " << n << "\n";
  return out.str();
}

Repository release(const Repository& repo, const std::map<std::string, ClassSchema>& working_set,
                   ReleaseReport* report, const ConverterRegistry& registry) {
  ReleaseReport local;
  ReleaseReport& rep = report ? *report : local;
  rep = ReleaseReport{};

  Release next;
  next.number = repo.latest_release() + 1;
  if (const Release* last = repo.releases.empty() ? nullptr : &repo.releases.back()) {
    next.schemas = last->schemas;
  }

  Repository out = repo;
  bool changed_any = false;
  for (const auto& [name, schema] : working_set) {
    if (schema.name != name) {
      throw Error(ErrorCode::MismatchedClassIdentity, {name, schema.name});
    }
    validate_schema(schema);
    const ClassSchema* prev = repo.latest_schema(name);
    ReleaseReport::Entry entry{name, 1, ClassStatus::New};
    if (!prev) {
      if (schema.version != 1) {
        throw Error(ErrorCode::VersionTagTamper, {name},
                    "new class must carry version 1, found " + std::to_string(schema.version));
      }
      next.schemas[name] = schema;
      changed_any = true;
    } else if (same_shape(*prev, schema)) {
      if (schema.version != prev->version) {
        throw Error(ErrorCode::VersionTagTamper, {name},
                    "unchanged class must keep version " + std::to_string(prev->version) +
                        ", found " + std::to_string(schema.version));
      }
      next.schemas[name] = *prev;
      entry = {name, prev->version, ClassStatus::Unchanged};
    } else {
      if (schema.version != prev->version && schema.version != prev->version + 1) {
        throw Error(ErrorCode::VersionTagTamper, {name},
                    "changed class must carry version " + std::to_string(prev->version) + " or " +
                        std::to_string(prev->version + 1) + ", found " +
                        std::to_string(schema.version));
      }
      ClassSchema tagged = schema;
      tagged.version = prev->version + 1;
      next.schemas[name] = tagged;
      entry = {name, tagged.version, ClassStatus::Changed};
      changed_any = true;

      const ClassTransformation diff = diff_schemas(*prev, tagged);
      for (const auto& n : diff.notes) rep.notes.push_back(name + ": " + n);
      auto& h = out.handlers[name];
      const VersionPair key{prev->version, tagged.version};
      if (!h.count(key)) {
        ObjectTransformer stub = generate_transformer(diff, registry);
        h.emplace(key, Handler{stub, sha256_hex(render_transformer(stub))});
        rep.stubs.emplace_back(name, key);
      }
    }
    rep.classes.push_back(entry);
  }

  if (!changed_any) {
    rep = ReleaseReport{};
    return repo;
  }
  out.releases.push_back(std::move(next));
  rep.no_op = false;
  rep.release_number = out.latest_release();
  return out;
}

Repository register_transformer(const Repository& repo, const ObjectTransformer& t, bool overwrite) {
  validate_transformer(t);
  const ClassSchema* source = repo.schema(t.class_name, t.from_version);
  if (!source) throw Error(ErrorCode::UnknownVersion, {t.class_name, std::to_string(t.from_version)});
  const ClassSchema* target = repo.schema(t.class_name, t.to_version);
  if (!target) throw Error(ErrorCode::UnknownVersion, {t.class_name, std::to_string(t.to_version)});
  validate_transformer(t, *source, *target);

  Repository out = repo;
  auto& h = out.handlers[t.class_name];
  const VersionPair key{t.from_version, t.to_version};
  if (h.count(key) && !overwrite) {
    if (h.at(key).transformer == t) return out;
    throw Error(ErrorCode::OverwriteRefused,
                {t.class_name, std::to_string(t.from_version), std::to_string(t.to_version)});
  }
  h[key] = Handler{t, sha256_hex(render_transformer(t))};
  return out;
}

ClassSchema apply_filter(const ClassSchema& schema, const std::set<std::string>& keep) {
  for (const auto& name : keep) {
    if (!schema.has(name)) throw Error(ErrorCode::UnknownAttribute, {name});
  }
  for (const auto& clause : schema.invariant.clauses) {
    std::set<std::string> refs;
    collect_attribute_refs(*clause.body, refs);
    for (const auto& r : refs) {
      if (!keep.count(r)) throw Error(ErrorCode::InvariantNeedsFilteredAttribute, {clause.tag, r});
    }
  }
  ClassSchema out = schema;
  out.attributes.clear();
  for (const auto& a : schema.attributes) {
    if (keep.count(a.name)) out.attributes.push_back(a);
  }
  return out;
}

ObjectRecord filter_record(const ObjectRecord& record, const ClassSchema& filtered) {
  ObjectRecord out = record;
  out.fields.clear();
  for (const auto& f : record.fields) {
    if (filtered.has(f.name)) out.fields.push_back(f);
  }
  return out;
}

}  // namespace escher
