#include "catforge/ctl/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace catforge::ctl {

const char* Value::type_name() const {
  switch (data_.index()) {
    case 0: return "null";
    case 1: return "bool";
    case 2: return "int";
    case 3: return "float";
    case 4: return "str";
    case 5: return "list";
    default: return "map";
  }
}

bool numeric_equal(std::int64_t i, double d) {
  if (!std::isfinite(d)) return false;
  if (std::floor(d) != d) return false;
  // Integral double; exact comparison is safe once d fits in int64 range.
  if (d < -9.3e18 || d > 9.3e18) return false;
  return static_cast<std::int64_t>(d) == i;
}

bool Value::operator==(const Value& other) const {
  if (is_number() && other.is_number()) {
    if (is_int() && other.is_int()) return as_int() == other.as_int();
    if (is_float() && other.is_float()) return as_float() == other.as_float();
    if (is_int()) return numeric_equal(as_int(), other.as_float());
    return numeric_equal(other.as_int(), as_float());
  }
  return data_ == other.data_;
}

std::size_t Value::byte_size() const {
  switch (data_.index()) {
    case 0:
    case 1: return 1;
    case 2:
    case 3: return 8;
    case 4: return 16 + as_str().size();
    case 5: {
      std::size_t total = 16;
      for (const auto& item : as_list()) total += item.byte_size();
      return total;
    }
    default: {
      std::size_t total = 16;
      for (const auto& [key, item] : as_map()) total += 16 + key.size() + item.byte_size();
      return total;
    }
  }
}

std::string float_repr(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), d);
  std::string text(buf, res.ptr);
  if (text.find_first_of(".eE") == std::string::npos) text += ".0";
  return text;
}

namespace {

void append_quoted(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char esc[8];
          std::snprintf(esc, sizeof(esc), "\\u%04x", c);
          out += esc;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void append_render(std::string& out, const Value& v) {
  if (v.is_null()) {
    out += "null";
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_int()) {
    out += std::to_string(v.as_int());
  } else if (v.is_float()) {
    out += float_repr(v.as_float());
  } else if (v.is_str()) {
    append_quoted(out, v.as_str());
  } else if (v.is_list()) {
    out.push_back('[');
    bool first = true;
    for (const auto& item : v.as_list()) {
      if (!first) out += ", ";
      first = false;
      append_render(out, item);
    }
    out.push_back(']');
  } else {
    out.push_back('{');
    bool first = true;
    for (const auto& [key, item] : v.as_map()) {
      if (!first) out += ", ";
      first = false;
      append_quoted(out, key);
      out += ": ";
      append_render(out, item);
    }
    out.push_back('}');
  }
}

}  // namespace

std::string render(const Value& v) {
  std::string out;
  append_render(out, v);
  return out;
}

std::string render_answer(const Value& v) {
  if (v.is_null()) return "";
  if (v.is_str()) return v.as_str();
  return render(v);
}

}  // namespace catforge::ctl
