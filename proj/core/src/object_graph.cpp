#include "escher/object_graph.hpp"

#include <limits>
#include <set>
#include <sstream>

#include "escher/error.hpp"
#include "internal/lexer.hpp"
#include "internal/schema_parse.hpp"

namespace escher {

namespace {

constexpr std::string_view kHeader = "ESCHER-OBJECTS 1";

[[noreturn]] void format_error(int line, std::string reason) {
  throw Error(ErrorCode::FormatError, {std::to_string(line)}, std::move(reason));
}

}  // namespace

bool operator==(const Field& a, const Field& b) {
  return a.name == b.name && type_identical(a.type, b.type) && a.value == b.value;
}

const Field* ObjectRecord::find(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool operator==(const ObjectRecord& a, const ObjectRecord& b) {
  return a.id == b.id && a.class_name == b.class_name && a.version == b.version &&
         a.fields == b.fields;
}

bool operator==(const ObjectGraph& a, const ObjectGraph& b) { return a.records == b.records; }

void validate_graph(const ObjectGraph& graph) {
  const std::uint64_t n = graph.records.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto& r = graph.records[i];
    if (r.id != i) {
      throw Error(ErrorCode::FormatError, {"0"},
                  "record at position " + std::to_string(i) + " has id " + std::to_string(r.id));
    }
    std::set<std::string_view> names;
    for (const auto& f : r.fields) {
      if (!names.insert(f.name).second) {
        throw Error(ErrorCode::FormatError, {"0"},
                    "duplicate field " + f.name + " in record " + std::to_string(i));
      }
      if (const auto* ref = std::get_if<RefVal>(&f.value); ref && ref->id >= n) {
        throw Error(ErrorCode::DanglingReference, {std::to_string(ref->id)});
      }
    }
  }
}

std::string serialize(const ObjectGraph& graph) {
  validate_graph(graph);
  std::ostringstream out;
  out << kHeader << "\n";
  for (const auto& r : graph.records) {
    out << "obj " << r.id << " " << r.class_name << " version " << r.version << "\n";
    for (const auto& f : r.fields) {
      out << "  " << f.name << ": " << render_type(f.type) << " = " << render_value(f.value)
          << "\n";
    }
    out << "end\n";
  }
  return out.str();
}

ObjectGraph deserialize(std::string_view text) {
  const auto eol = text.find('\n');
  std::string_view first = text.substr(0, eol);
  if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
  if (first != kHeader) format_error(1, "expected header \"ESCHER-OBJECTS 1\"");
  const std::string_view body = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

  ObjectGraph graph;
  try {
    detail::TokenCursor cur(detail::tokenize(body, false, 2));
    auto expect_name = [&](std::string_view what) {
      const auto& t = cur.peek();
      if (t.kind != detail::TokKind::Ident || detail::is_schema_keyword(t.text)) cur.fail(what);
      return cur.next().text;
    };
    while (!cur.at_end()) {
      const int line = cur.peek().line;
      cur.expect_keyword("obj");
      ObjectRecord r;
      const std::int64_t id = cur.expect_integer("object id");
      if (id != static_cast<std::int64_t>(graph.records.size())) {
        format_error(line, "expected object id " + std::to_string(graph.records.size()));
      }
      r.id = static_cast<std::uint64_t>(id);
      r.class_name = expect_name("class name");
      cur.expect_keyword("version");
      const std::int64_t v = cur.expect_integer("version number");
      if (v < 1 || v > std::numeric_limits<int>::max()) format_error(line, "bad version");
      r.version = static_cast<int>(v);
      std::set<std::string> names;
      while (!cur.at_keyword("end")) {
        const int field_line = cur.peek().line;
        Field f;
        f.name = expect_name("field name");
        cur.expect_symbol(":");
        f.type = detail::parse_type_expr(cur, nullptr);
        cur.expect_symbol("=");
        f.value = detail::parse_value_literal(cur);
        if (!names.insert(f.name).second) format_error(field_line, "duplicate field " + f.name);
        r.fields.push_back(std::move(f));
      }
      cur.expect_keyword("end");
      graph.records.push_back(std::move(r));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SyntaxError) throw;
    format_error(std::stoi(e.args().at(0)),
                 "expected " + e.args().at(2) + " at column " + e.args().at(1));
  }
  for (const auto& r : graph.records) {
    for (const auto& f : r.fields) {
      if (const auto* ref = std::get_if<RefVal>(&f.value); ref && ref->id >= graph.records.size()) {
        throw Error(ErrorCode::DanglingReference, {std::to_string(ref->id)});
      }
    }
  }
  return graph;
}

ObjectValue parse_value(std::string_view text) {
  try {
    detail::TokenCursor cur(detail::tokenize(text));
    ObjectValue v = detail::parse_value_literal(cur);
    if (!cur.at_end()) cur.fail("end of value");
    return v;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SyntaxError) throw;
    throw Error(ErrorCode::FormatError, {"1"}, "bad value literal '" + std::string(text) + "'");
  }
}

bool value_conforms(const TypeExpr& type, const ObjectValue& value) {
  if (is_void(value)) {
    if (type.is_attached()) return false;
    const Primitive p = primitive_of(type);
    return p == Primitive::None || p == Primitive::String;
  }
  switch (primitive_of(type)) {
    case Primitive::Integer: return std::holds_alternative<IntVal>(value);
    case Primitive::Real: return std::holds_alternative<RealVal>(value);
    case Primitive::Boolean: return std::holds_alternative<BoolVal>(value);
    case Primitive::String: return std::holds_alternative<StringVal>(value);
    case Primitive::None: break;
  }
  const TypeExpr* t = &type;
  if (const auto* a = std::get_if<Attached>(&t->node())) t = a->inner.get();
  if (const auto* d = std::get_if<Detachable>(&t->node())) t = d->inner.get();
  // A generic parameter may be instantiated with anything.
  if (std::holds_alternative<GenericParamRef>(t->node())) return true;
  return std::holds_alternative<RefVal>(value);
}

ObjectValue default_value(const TypeExpr& type) {
  switch (primitive_of(type)) {
    case Primitive::Integer: return IntVal{0};
    case Primitive::Real: return RealVal{0.0};
    case Primitive::Boolean: return BoolVal{false};
    case Primitive::String: return StringVal{""};
    case Primitive::None: break;
  }
  return VoidVal{};
}

}  // namespace escher
