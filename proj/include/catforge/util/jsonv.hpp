#pragma once

#include "json.hpp"

#include "catforge/ctl/value.hpp"

namespace catforge::util {

// nlohmann objects sort keys, which keeps every dump canonical.
nlohmann::json value_to_json(const ctl::Value& v);
ctl::Value json_to_value(const nlohmann::json& j);

}  // namespace catforge::util
