#include "escher/smo.hpp"

#include <algorithm>
#include <sstream>

#include "escher/error.hpp"
#include "internal/overloaded.hpp"

namespace escher {

using detail::Overloaded;

namespace {

std::string_view smo_kind(const Smo& smo) {
  return std::visit(Overloaded{
                        [](const NoChange&) { return std::string_view("no_change"); },
                        [](const Added&) { return std::string_view("added"); },
                        [](const Renamed&) { return std::string_view("renamed"); },
                        [](const TypeChanged&) { return std::string_view("type_changed"); },
                        [](const Removed&) { return std::string_view("removed"); },
                        [](const AttachAdded&) { return std::string_view("attach_added"); },
                    },
                    smo);
}

std::string smo_subject(const Smo& smo) {
  return std::visit(Overloaded{
                        [](const NoChange& s) { return s.attribute.name; },
                        [](const Added& s) { return s.attribute.name; },
                        [](const Renamed& s) { return s.old_name; },
                        [](const TypeChanged& s) { return s.name; },
                        [](const Removed& s) { return s.name; },
                        [](const AttachAdded& s) { return s.name; },
                    },
                    smo);
}

[[noreturn]] void premise_violated(const Smo& smo, std::string reason) {
  throw Error(ErrorCode::PremiseViolated, {std::string(smo_kind(smo)), smo_subject(smo)},
              std::move(reason));
}

std::vector<Attribute>::iterator require_attribute(ClassSchema& schema, const Smo& smo,
                                                   const std::string& name, const TypePtr& type) {
  auto it = std::find_if(schema.attributes.begin(), schema.attributes.end(),
                         [&](const Attribute& a) { return a.name == name; });
  if (it == schema.attributes.end()) premise_violated(smo, "attribute " + name + " not in class");
  if (type && !type_equal(it->type, type)) {
    premise_violated(smo, "attribute " + name + " has type " + render_type(it->type) + ", not " +
                              render_type(type));
  }
  return it;
}

void require_absent(const ClassSchema& schema, const Smo& smo, const std::string& name) {
  if (schema.has(name)) premise_violated(smo, "attribute " + name + " already in class");
  if (std::find(schema.generic_params.begin(), schema.generic_params.end(), name) !=
      schema.generic_params.end()) {
    premise_violated(smo, name + " names a generic parameter");
  }
}

void handle_dangling(ClassSchema& schema, const std::string& vanished, const ApplyOptions& options,
                     std::vector<std::string>* warnings) {
  auto& clauses = schema.invariant.clauses;
  for (auto it = clauses.begin(); it != clauses.end();) {
    std::set<std::string> refs;
    collect_attribute_refs(*it->body, refs);
    if (!refs.count(vanished)) {
      ++it;
      continue;
    }
    if (!options.drop_dangling_clauses) {
      throw Error(ErrorCode::InvariantDanglesAfterRemoval, {vanished},
                  "invariant clause " + it->tag + " references it");
    }
    if (warnings) {
      warnings->push_back("dropped invariant clause " + it->tag + " referencing " + vanished);
    }
    it = clauses.erase(it);
  }
}

// `attached T` replacing an unmarked or detachable T.
bool is_attach_strengthening(const TypePtr& old_type, const TypePtr& new_type) {
  const auto* a = std::get_if<Attached>(&new_type->node());
  return a && !old_type->is_attached() && type_equal(old_type, a->inner);
}

bool is_attach_relaxation(const TypePtr& old_type, const TypePtr& new_type) {
  const auto* a = std::get_if<Attached>(&old_type->node());
  return a && !new_type->is_attached() && type_equal(a->inner, new_type);
}

TypePtr without_detachable(const TypePtr& t) {
  if (const auto* d = std::get_if<Detachable>(&t->node())) return d->inner;
  return t;
}

void check_identity(const ClassSchema& a, const ClassSchema& b) {
  if (a.name != b.name || a.generic_params != b.generic_params) {
    throw Error(ErrorCode::MismatchedClassIdentity, {a.name, b.name},
                a.name != b.name ? "class names differ" : "generic parameter lists differ");
  }
}

}  // namespace

bool smo_equal(const Smo& a, const Smo& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      Overloaded{
          [&](const NoChange& x) { return x.attribute == std::get<NoChange>(b).attribute; },
          [&](const Added& x) { return x.attribute == std::get<Added>(b).attribute; },
          [&](const Renamed& x) {
            const auto& y = std::get<Renamed>(b);
            return x.old_name == y.old_name && x.new_name == y.new_name &&
                   type_identical(x.type, y.type) && x.candidate == y.candidate;
          },
          [&](const TypeChanged& x) {
            const auto& y = std::get<TypeChanged>(b);
            return x.name == y.name && type_identical(x.old_type, y.old_type) &&
                   type_identical(x.new_type, y.new_type);
          },
          [&](const Removed& x) {
            const auto& y = std::get<Removed>(b);
            return x.name == y.name && type_identical(x.old_type, y.old_type);
          },
          [&](const AttachAdded& x) {
            const auto& y = std::get<AttachAdded>(b);
            return x.name == y.name && type_identical(x.inner_type, y.inner_type);
          },
      },
      a);
}

std::string render_smo(const Smo& smo) {
  std::string body = std::visit(
      Overloaded{
          [](const NoChange& s) { return s.attribute.name + " " + render_type(s.attribute.type); },
          [](const Added& s) { return s.attribute.name + " " + render_type(s.attribute.type); },
          [](const Renamed& s) {
            return s.old_name + " -> " + s.new_name + " " + render_type(s.type) +
                   (s.candidate ? " candidate" : "");
          },
          [](const TypeChanged& s) {
            return s.name + " " + render_type(s.old_type) + " -> " + render_type(s.new_type);
          },
          [](const Removed& s) { return s.name + " " + render_type(s.old_type); },
          [](const AttachAdded& s) { return s.name + " " + render_type(s.inner_type); },
      },
      smo);
  return "smo " + std::string(smo_kind(smo)) + " " + body;
}

std::string render_report(const ClassTransformation& t) {
  std::string out;
  for (const auto& s : t.smos) {
    out += render_smo(s);
    out += '\n';
  }
  return out;
}

ClassSchema apply_smo(const ClassSchema& schema, const Smo& smo, const ApplyOptions& options,
                      std::vector<std::string>* warnings) {
  ClassSchema out = schema;
  std::visit(Overloaded{
                 [&](const NoChange& s) {
                   require_attribute(out, smo, s.attribute.name, s.attribute.type);
                 },
                 [&](const Added& s) {
                   require_absent(out, smo, s.attribute.name);
                   out.attributes.push_back(s.attribute);
                 },
                 [&](const Renamed& s) {
                   if (s.old_name == s.new_name) premise_violated(smo, "rename to the same name");
                   auto it = require_attribute(out, smo, s.old_name, s.type);
                   require_absent(out, smo, s.new_name);
                   it->name = s.new_name;
                   handle_dangling(out, s.old_name, options, warnings);
                 },
                 [&](const TypeChanged& s) {
                   if (type_equal(s.old_type, s.new_type)) {
                     premise_violated(smo, "old and new types are equal");
                   }
                   auto it = require_attribute(out, smo, s.name, s.old_type);
                   it->type = s.new_type;
                 },
                 [&](const Removed& s) {
                   auto it = require_attribute(out, smo, s.name, s.old_type);
                   out.attributes.erase(it);
                   handle_dangling(out, s.name, options, warnings);
                 },
                 [&](const AttachAdded& s) {
                   if (s.inner_type->is_attached()) premise_violated(smo, "inner type is attached");
                   auto it = require_attribute(out, smo, s.name, s.inner_type);
                   if (it->type->is_attached()) premise_violated(smo, "attribute already attached");
                   it->type = TypeExpr::attached(without_detachable(it->type));
                 },
             },
             smo);
  return out;
}

ClassSchema apply_transformation(const ClassSchema& schema, const std::vector<Smo>& smos,
                                 const ApplyOptions& options, std::vector<std::string>* warnings) {
  ClassSchema current = schema;
  for (std::size_t i = 0; i < smos.size(); ++i) {
    try {
      current = apply_smo(current, smos[i], options, warnings);
    } catch (const Error& e) {
      throw Error(e.code(), e.args(), "smo #" + std::to_string(i) + ": " + e.detail());
    }
  }
  return current;
}

ClassTransformation diff_schemas(const ClassSchema& old_schema, const ClassSchema& new_schema) {
  check_identity(old_schema, new_schema);
  ClassTransformation t{old_schema, new_schema, {}, {}};

  std::vector<Smo> unchanged;
  std::vector<Smo> retyped;
  std::vector<const Attribute*> added;
  for (const auto& att : new_schema.attributes) {
    const Attribute* before = old_schema.find(att.name);
    if (!before) {
      added.push_back(&att);
    } else if (type_equal(before->type, att.type)) {
      unchanged.push_back(NoChange{att});
    } else if (is_attach_strengthening(before->type, att.type)) {
      retyped.push_back(AttachAdded{att.name, without_detachable(before->type)});
    } else {
      if (is_attach_relaxation(before->type, att.type)) {
        t.notes.push_back("attachment of " + att.name +
                          " relaxed from attached; existing values copy unchanged");
      }
      retyped.push_back(TypeChanged{att.name, before->type, att.type});
    }
  }
  std::vector<const Attribute*> removed;
  for (const auto& att : old_schema.attributes) {
    if (!new_schema.has(att.name)) removed.push_back(&att);
  }

  auto count_type = [](const std::vector<const Attribute*>& set, const TypePtr& type) {
    return std::count_if(set.begin(), set.end(),
                         [&](const Attribute* a) { return type_equal(a->type, type); });
  };

  // A rename is suggested only when exactly one removed and exactly one added
  // attribute share a type; any other multiplicity stays removal + addition.
  std::vector<Smo> renamed;
  std::vector<const Attribute*> paired_added;
  std::vector<const Attribute*> still_removed;
  for (const Attribute* r : removed) {
    if (count_type(removed, r->type) == 1 && count_type(added, r->type) == 1) {
      auto it = std::find_if(added.begin(), added.end(),
                             [&](const Attribute* a) { return type_equal(a->type, r->type); });
      renamed.push_back(Renamed{r->name, (*it)->name, r->type, true});
      paired_added.push_back(*it);
    } else {
      still_removed.push_back(r);
    }
  }

  auto append = [&](std::vector<Smo>& from) {
    t.smos.insert(t.smos.end(), from.begin(), from.end());
  };
  append(unchanged);
  append(retyped);
  append(renamed);
  for (const Attribute* r : still_removed) t.smos.push_back(Removed{r->name, r->type});
  for (const Attribute* a : added) {
    if (std::find(paired_added.begin(), paired_added.end(), a) == paired_added.end()) {
      t.smos.push_back(Added{*a});
    }
  }
  return t;
}

ClassTransformation completeness_witness(const ClassSchema& old_schema,
                                         const ClassSchema& new_schema) {
  check_identity(old_schema, new_schema);
  ClassTransformation t{old_schema, new_schema, {}, {}};
  for (const auto& att : old_schema.attributes) t.smos.push_back(Removed{att.name, att.type});
  for (const auto& att : new_schema.attributes) t.smos.push_back(Added{att});
  return t;
}

}  // namespace escher
