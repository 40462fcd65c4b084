#include "escher/transformer.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "escher/error.hpp"
#include "internal/lexer.hpp"
#include "internal/overloaded.hpp"

namespace escher {

using detail::Overloaded;

// ---------------------------------------------------------------------------
// Instructions
// ---------------------------------------------------------------------------

bool instr_equal(const TransformerInstr& a, const TransformerInstr& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      Overloaded{
          [&](const CopyField& x) {
            const auto& y = std::get<CopyField>(b);
            return x.target == y.target && x.source == y.source;
          },
          [&](const AssignInput& x) { return x.target == std::get<AssignInput>(b).target; },
          [&](const AssignConverted& x) {
            const auto& y = std::get<AssignConverted>(b);
            return x.target == y.target && x.converter == y.converter && x.source == y.source;
          },
          [&](const AssignExpr& x) {
            const auto& y = std::get<AssignExpr>(b);
            return x.target == y.target && expr_equal(x.value, y.value);
          },
          [&](const Noop& x) { return x.warning == std::get<Noop>(b).warning; },
          [&](const CheckAttached& x) { return x.target == std::get<CheckAttached>(b).target; },
      },
      a);
}

std::optional<std::string> assigned_target(const TransformerInstr& instr) {
  return std::visit(Overloaded{
                        [](const CopyField& x) -> std::optional<std::string> { return x.target; },
                        [](const AssignInput& x) -> std::optional<std::string> { return x.target; },
                        [](const AssignConverted& x) -> std::optional<std::string> {
                          return x.target;
                        },
                        [](const AssignExpr& x) -> std::optional<std::string> { return x.target; },
                        [](const auto&) -> std::optional<std::string> { return std::nullopt; },
                    },
                    instr);
}

ExprPtr assigned_value(const TransformerInstr& instr) {
  return std::visit(Overloaded{
                        [](const CopyField& x) { return make_old_field(x.source); },
                        [](const AssignInput& x) { return make_input(x.target); },
                        [](const AssignConverted& x) {
                          return make_convert(x.converter, make_old_field(x.source));
                        },
                        [](const AssignExpr& x) { return x.value; },
                        [](const auto&) { return ExprPtr{}; },
                    },
                    instr);
}

std::set<std::string> ObjectTransformer::required_inputs() const {
  std::set<std::string> out;
  for (const auto& i : instructions) {
    if (ExprPtr v = assigned_value(i)) collect_inputs(*v, out);
  }
  return out;
}

std::vector<std::string> ObjectTransformer::warnings() const {
  std::vector<std::string> out;
  for (const auto& i : instructions) {
    if (const auto* n = std::get_if<Noop>(&i); n && !n->warning.empty()) out.push_back(n->warning);
  }
  return out;
}

bool operator==(const ObjectTransformer& a, const ObjectTransformer& b) {
  if (a.class_name != b.class_name || a.from_version != b.from_version ||
      a.to_version != b.to_version || a.instructions.size() != b.instructions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.instructions.size(); ++i) {
    if (!instr_equal(a.instructions[i], b.instructions[i])) return false;
  }
  return true;
}

void validate_transformer(const ObjectTransformer& t) {
  if (t.from_version == t.to_version || t.from_version < 1 || t.to_version < 1) {
    throw Error(ErrorCode::InvalidTransformer,
                {t.class_name, std::to_string(t.from_version), std::to_string(t.to_version)},
                "source and target versions must be distinct positive integers");
  }
  std::set<std::string> targets;
  for (const auto& i : t.instructions) {
    if (auto target = assigned_target(i); target && !targets.insert(*target).second) {
      throw Error(ErrorCode::DuplicateTarget, {*target});
    }
  }
}

void validate_transformer(const ObjectTransformer& t, const ClassSchema& source,
                          const ClassSchema& target) {
  validate_transformer(t);
  for (const auto& i : t.instructions) {
    std::string name;
    if (auto tgt = assigned_target(i)) {
      name = *tgt;
    } else if (const auto* c = std::get_if<CheckAttached>(&i)) {
      name = c->target;
    }
    if (!name.empty() && !target.has(name)) {
      throw Error(ErrorCode::InvalidTransformer, {t.class_name, name},
                  "not an attribute of version " + std::to_string(target.version));
    }
    if (ExprPtr v = assigned_value(i)) {
      std::set<std::string> fields;
      collect_old_fields(*v, fields);
      for (const auto& f : fields) {
        if (!source.has(f)) {
          throw Error(ErrorCode::InvalidTransformer, {t.class_name, f},
                      "oldc field not in version " + std::to_string(source.version));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Converters
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void conversion_failure(std::string_view id, const ObjectValue& v) {
  std::string shown = std::holds_alternative<RealVal>(v) && !std::isfinite(std::get<RealVal>(v).value)
                          ? std::string("non-finite")
                          : render_value(v);
  throw Error(ErrorCode::ConversionFailure, {std::string(id), shown});
}

template <class T>
const T& expect_kind(std::string_view id, const ObjectValue& v) {
  const T* x = std::get_if<T>(&v);
  if (!x) conversion_failure(id, v);
  return *x;
}

std::vector<Converter> builtin_converters() {
  const TypePtr integer = TypeExpr::class_type(std::string(kInteger));
  const TypePtr real = TypeExpr::class_type(std::string(kReal));
  const TypePtr string = TypeExpr::class_type(std::string(kString));
  std::vector<Converter> out;
  out.push_back({"STRING_TO_INTEGER", string, integer, [](const ObjectValue& v) -> ObjectValue {
                   const auto& s = expect_kind<StringVal>("STRING_TO_INTEGER", v).value;
                   std::int64_t n = 0;
                   auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
                   if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
                     conversion_failure("STRING_TO_INTEGER", v);
                   }
                   return IntVal{n};
                 }});
  out.push_back({"INTEGER_TO_STRING", integer, string, [](const ObjectValue& v) -> ObjectValue {
                   return StringVal{std::to_string(expect_kind<IntVal>("INTEGER_TO_STRING", v).value)};
                 }});
  out.push_back({"INTEGER_TO_REAL", integer, real, [](const ObjectValue& v) -> ObjectValue {
                   const std::int64_t n = expect_kind<IntVal>("INTEGER_TO_REAL", v).value;
                   const double d = static_cast<double>(n);
                   // Exact only: 2^63 itself is out of int64 range.
                   if (d >= 9223372036854775808.0 || static_cast<std::int64_t>(d) != n) {
                     conversion_failure("INTEGER_TO_REAL", v);
                   }
                   return RealVal{d};
                 }});
  out.push_back({"REAL_TO_INTEGER", real, integer, [](const ObjectValue& v) -> ObjectValue {
                   const double d = std::trunc(expect_kind<RealVal>("REAL_TO_INTEGER", v).value);
                   if (!std::isfinite(d) || d < -9223372036854775808.0 || d >= 9223372036854775808.0) {
                     conversion_failure("REAL_TO_INTEGER", v);
                   }
                   return IntVal{static_cast<std::int64_t>(d)};
                 }});
  out.push_back({"STRING_TO_REAL", string, real, [](const ObjectValue& v) -> ObjectValue {
                   const auto& s = expect_kind<StringVal>("STRING_TO_REAL", v).value;
                   double d = 0;
                   auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
                   if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() ||
                       !std::isfinite(d)) {
                     conversion_failure("STRING_TO_REAL", v);
                   }
                   return RealVal{d};
                 }});
  out.push_back({"REAL_TO_STRING", real, string, [](const ObjectValue& v) -> ObjectValue {
                   const double d = expect_kind<RealVal>("REAL_TO_STRING", v).value;
                   if (!std::isfinite(d)) conversion_failure("REAL_TO_STRING", v);
                   return StringVal{render_real(d)};
                 }});
  return out;
}

}  // namespace

ConverterRegistry::ConverterRegistry(std::vector<Converter> converters) {
  for (auto& c : converters) *this = with(std::move(c));
}

const ConverterRegistry& ConverterRegistry::builtins() {
  static const ConverterRegistry registry(builtin_converters());
  return registry;
}

ConverterRegistry ConverterRegistry::with(Converter converter) const {
  if (find_id(converter.id)) {
    throw Error(ErrorCode::DuplicateConverter, {converter.id});
  }
  for (const auto& c : converters_) {
    if (type_equal(c.source, converter.source) && type_equal(c.target, converter.target)) {
      throw Error(ErrorCode::DuplicateConverter, {converter.id},
                  "pair already served by " + c.id);
    }
  }
  ConverterRegistry out = *this;
  out.converters_.push_back(std::move(converter));
  return out;
}

const Converter* ConverterRegistry::find(const TypePtr& source, const TypePtr& target) const {
  for (const auto& c : converters_) {
    if (type_equal(c.source, source) && type_equal(c.target, target)) return &c;
  }
  // Attachment does not change how a value converts.
  const TypePtr s = strip_markers(source);
  const TypePtr t = strip_markers(target);
  for (const auto& c : converters_) {
    if (type_equal(strip_markers(c.source), s) && type_equal(strip_markers(c.target), t)) {
      return &c;
    }
  }
  return nullptr;
}

const Converter* ConverterRegistry::find_id(std::string_view id) const {
  for (const auto& c : converters_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

ObjectValue ConverterRegistry::apply(std::string_view id, const ObjectValue& value) const {
  const Converter* c = find_id(id);
  if (!c) throw Error(ErrorCode::UnknownConverter, {std::string(id)});
  if (is_void(value)) conversion_failure(id, value);
  return c->fn(value);
}

bool assignable(const TypePtr& from, const TypePtr& to) {
  if (type_equal(from, to)) return true;
  // attached T conforms to detachable T (and to unmarked T).
  if (const auto* a = std::get_if<Attached>(&from->node()); a && !to->is_attached()) {
    if (type_equal(a->inner, to)) return true;
  }
  // Primitive widening.
  if (primitive_of(*from) == Primitive::Integer && primitive_of(*to) == Primitive::Real) {
    return !to->is_attached() || from->is_attached();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

ObjectTransformer generate_transformer(const ClassTransformation& transformation,
                                       const ConverterRegistry& registry) {
  ObjectTransformer t;
  t.class_name = transformation.target.name;
  t.from_version = transformation.source.version;
  t.to_version = transformation.target.version;
  auto& out = t.instructions;
  for (const auto& smo : transformation.smos) {
    std::visit(
        Overloaded{
            [&](const NoChange& s) { out.push_back(CopyField{s.attribute.name, s.attribute.name}); },
            [&](const Added& s) { out.push_back(AssignInput{s.attribute.name}); },
            [&](const Renamed& s) {
              if (s.candidate) {
                out.push_back(Noop{"possible rename of " + s.old_name + " to " + s.new_name +
                                   "; verify semantics"});
              }
              out.push_back(CopyField{s.new_name, s.old_name});
            },
            [&](const TypeChanged& s) {
              if (assignable(s.old_type, s.new_type)) {
                out.push_back(CopyField{s.name, s.name});
              } else if (const Converter* c = registry.find(s.old_type, s.new_type)) {
                out.push_back(AssignConverted{s.name, c->id, s.name});
              } else {
                out.push_back(Noop{"no conversion from " + render_type(s.old_type) + " to " +
                                   render_type(s.new_type) + " for " + s.name});
                out.push_back(AssignInput{s.name});
              }
            },
            [&](const Removed& s) {
              out.push_back(Noop{"attribute " + s.name + " removed; value will be dropped"});
            },
            [&](const AttachAdded& s) {
              out.push_back(CopyField{s.name, s.name});
              out.push_back(CheckAttached{s.name});
            },
        },
        smo);
  }
  validate_transformer(t);
  return t;
}

// ---------------------------------------------------------------------------
// .est text format
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kWarningPrefix = "warning:";

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

TransformerInstr classify_assignment(std::string target, ExprPtr value) {
  if (const auto* f = std::get_if<OldField>(&value->node)) return CopyField{target, f->name};
  if (const auto* in = std::get_if<InputRef>(&value->node); in && in->name == target) {
    return AssignInput{target};
  }
  if (const auto* c = std::get_if<ConvertCall>(&value->node)) {
    if (const auto* f = std::get_if<OldField>(&c->arg->node)) {
      return AssignConverted{target, c->converter, f->name};
    }
  }
  return AssignExpr{std::move(target), std::move(value)};
}

}  // namespace

std::string render_instruction(const TransformerInstr& instr) {
  return std::visit(
      Overloaded{
          [](const Noop& n) {
            if (n.warning.empty()) return std::string("noop");
            return "-- warning: " + one_line(n.warning) + "\nnoop";
          },
          [](const CheckAttached& c) { return "require_attached Result." + c.target; },
          [&](const auto& assign) {
            return "Result." + assign.target + " := " + render_expr(*assigned_value(instr));
          },
      },
      instr);
}

std::string render_transformer(const ObjectTransformer& t) {
  std::ostringstream out;
  out << "transform " << t.class_name << " from " << t.from_version << " to " << t.to_version
      << "\n";
  for (const auto& i : t.instructions) {
    std::istringstream lines(render_instruction(i));
    for (std::string line; std::getline(lines, line);) out << "  " << line << "\n";
  }
  out << "end\n";
  return out.str();
}

ObjectTransformer parse_transformer(std::string_view source, const ConverterRegistry& registry) {
  using detail::TokKind;
  detail::TokenCursor cur(detail::tokenize(source, /*keep_comments=*/true));
  auto skip_comments = [&] {
    while (cur.peek().kind == TokKind::Comment) cur.next();
  };
  auto expect_name = [&] {
    if (cur.peek().kind != TokKind::Ident) cur.fail("identifier");
    return cur.next().text;
  };
  auto expect_version = [&] {
    const auto& tok = cur.peek();
    const std::int64_t v = cur.expect_integer("version number");
    if (v < 1 || v > std::numeric_limits<int>::max()) {
      detail::syntax_error(tok.line, tok.column, "positive version number");
    }
    return static_cast<int>(v);
  };

  ObjectTransformer t;
  skip_comments();
  cur.expect_keyword("transform");
  t.class_name = expect_name();
  cur.expect_keyword("from");
  t.from_version = expect_version();
  cur.expect_keyword("to");
  t.to_version = expect_version();

  int last_line = cur.previous().line;
  std::optional<std::string> pending_warning;
  for (;;) {
    const detail::Token& tok = cur.peek();
    if (tok.kind == TokKind::Comment) {
      std::string_view text = tok.text;
      while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
      if (text.substr(0, kWarningPrefix.size()) == kWarningPrefix) {
        text.remove_prefix(kWarningPrefix.size());
        if (!text.empty() && text.front() == ' ') text.remove_prefix(1);
        pending_warning = std::string(text);
      }
      cur.next();
      continue;
    }
    if (cur.at_keyword("end")) break;
    if (tok.line <= last_line) cur.fail("statement on a new line");
    if (cur.accept_keyword("noop")) {
      t.instructions.push_back(Noop{pending_warning.value_or("")});
    } else if (cur.accept_keyword("require_attached")) {
      cur.expect_keyword("Result");
      cur.expect_symbol(".");
      t.instructions.push_back(CheckAttached{expect_name()});
    } else if (cur.accept_keyword("Result")) {
      cur.expect_symbol(".");
      std::string target = expect_name();
      cur.expect_symbol(":=");
      ExprPtr value = detail::parse_expression(cur, detail::ExprMode::Transformer);
      std::set<std::string> converters;
      collect_converters(*value, converters);
      for (const auto& id : converters) {
        if (!registry.find_id(id)) throw Error(ErrorCode::UnknownConverter, {id});
      }
      t.instructions.push_back(classify_assignment(std::move(target), std::move(value)));
    } else {
      cur.fail("statement");
    }
    pending_warning.reset();
    last_line = cur.previous().line;
  }
  cur.expect_keyword("end");
  skip_comments();
  if (!cur.at_end()) cur.fail("end of input");
  validate_transformer(t);
  return t;
}

}  // namespace escher
