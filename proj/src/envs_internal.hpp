#pragma once

#include <memory>

#include "catforge/envs/suite.hpp"

namespace catforge::envs {

std::unique_ptr<Environment> make_retail_env(Scale scale);
std::unique_ptr<Environment> make_airline_env(Scale scale);
std::unique_ptr<Environment> make_calculation_env(Scale scale);
std::unique_ptr<Environment> make_web_env(Scale scale);

// Cents-exact dollar amount.
inline double dollars(std::int64_t cents) { return static_cast<double>(cents) / 100.0; }

}  // namespace catforge::envs
