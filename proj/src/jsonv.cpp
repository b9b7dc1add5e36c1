#include "catforge/util/jsonv.hpp"

#include <stdexcept>

namespace catforge::util {

using ctl::Value;

nlohmann::json value_to_json(const Value& v) {
  if (v.is_null()) return nullptr;
  if (v.is_bool()) return v.as_bool();
  if (v.is_int()) return v.as_int();
  if (v.is_float()) return v.as_float();
  if (v.is_str()) return v.as_str();
  if (v.is_list()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Value& item : v.as_list()) arr.push_back(value_to_json(item));
    return arr;
  }
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [key, item] : v.as_map()) obj[key] = value_to_json(item);
  return obj;
}

Value json_to_value(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return Value();
    case nlohmann::json::value_t::boolean: return Value(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return Value(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: {
      std::uint64_t u = j.get<std::uint64_t>();
      if (u > 9223372036854775807ULL) {
        throw std::runtime_error("integer out of Value range");
      }
      return Value(static_cast<std::int64_t>(u));
    }
    case nlohmann::json::value_t::number_float: return Value(j.get<double>());
    case nlohmann::json::value_t::string: return Value(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      Value::List items;
      items.reserve(j.size());
      for (const auto& item : j) items.push_back(json_to_value(item));
      return Value(std::move(items));
    }
    case nlohmann::json::value_t::object: {
      Value::Map entries;
      for (const auto& [key, item] : j.items()) entries[key] = json_to_value(item);
      return Value(std::move(entries));
    }
    default:
      throw std::runtime_error("unsupported JSON value type");
  }
}

}  // namespace catforge::util
