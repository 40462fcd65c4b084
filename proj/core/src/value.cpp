#include "escher/value.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "escher/error.hpp"

namespace escher {

std::string_view value_kind(const ObjectValue& v) {
  struct Visitor {
    std::string_view operator()(const IntVal&) const { return "integer"; }
    std::string_view operator()(const RealVal&) const { return "real"; }
    std::string_view operator()(const BoolVal&) const { return "boolean"; }
    std::string_view operator()(const StringVal&) const { return "string"; }
    std::string_view operator()(const VoidVal&) const { return "void"; }
    std::string_view operator()(const RefVal&) const { return "reference"; }
  };
  return std::visit(Visitor{}, v);
}

std::string render_real(double d) {
  if (!std::isfinite(d)) {
    throw Error(ErrorCode::FormatError, {"0", "non-finite real"});
  }
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  std::string s(buf.data(), ptr);
  auto e = s.find('e');
  if (s.find('.') == std::string::npos) {
    if (e == std::string::npos) {
      s += ".0";
    } else {
      s.insert(e, ".0");
    }
  }
  return s;
}

std::string quote_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string render_value(const ObjectValue& v) {
  struct Visitor {
    std::string operator()(const IntVal& x) const { return std::to_string(x.value); }
    std::string operator()(const RealVal& x) const { return render_real(x.value); }
    std::string operator()(const BoolVal& x) const { return x.value ? "true" : "false"; }
    std::string operator()(const StringVal& x) const { return quote_string(x.value); }
    std::string operator()(const VoidVal&) const { return "Void"; }
    std::string operator()(const RefVal& x) const { return "ref " + std::to_string(x.id); }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace escher
