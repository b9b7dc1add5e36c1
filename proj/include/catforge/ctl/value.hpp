#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace catforge::ctl {

class Value;

// Runtime value of the task language: a tree, never a graph. Maps keep keys
// sorted so every rendering of a value is canonical.
class Value {
 public:
  using List = std::vector<Value>;
  using Map = std::map<std::string, Value>;

  Value() : data_(std::monostate{}) {}
  Value(std::nullptr_t) : data_(std::monostate{}) {}
  Value(bool b) : data_(b) {}
  Value(std::int64_t i) : data_(i) {}
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}
  Value(double d) : data_(d) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(List l) : data_(std::move(l)) {}
  Value(Map m) : data_(std::move(m)) {}

  bool is_null() const { return std::holds_alternative<std::monostate>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_str() const { return std::holds_alternative<std::string>(data_); }
  bool is_list() const { return std::holds_alternative<List>(data_); }
  bool is_map() const { return std::holds_alternative<Map>(data_); }
  bool is_number() const { return is_int() || is_float(); }

  bool as_bool() const { return std::get<bool>(data_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  const std::string& as_str() const { return std::get<std::string>(data_); }
  const List& as_list() const { return std::get<List>(data_); }
  const Map& as_map() const { return std::get<Map>(data_); }
  List& as_list() { return std::get<List>(data_); }
  Map& as_map() { return std::get<Map>(data_); }

  // Int promoted to double; only valid for numbers.
  double number() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }

  const char* type_name() const;

  // Deep structural equality; Int and Float compare numerically and exactly.
  bool operator==(const Value& other) const;
  bool operator!=(const Value& other) const { return !(*this == other); }

  // Approximate heap footprint, for the evaluator's value-size limit.
  std::size_t byte_size() const;

 private:
  std::variant<std::monostate, bool, std::int64_t, double, std::string, List, Map> data_;
};

// Exact Int-vs-Float numeric equality (no epsilon, no precision loss).
bool numeric_equal(std::int64_t i, double d);

// Shortest round-trip decimal form; integral values get a trailing ".0" so
// the text never re-reads as an Int.
std::string float_repr(double d);

// Canonical JSON-style rendering (sorted keys, double-quoted strings).
std::string render(const Value& v);

// Plain-text form used for final answers: strings unquoted, null empty.
std::string render_answer(const Value& v);

}  // namespace catforge::ctl
