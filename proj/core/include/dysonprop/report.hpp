#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace dysonprop {

struct Report {
  std::string check_name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  nlohmann::json context = nlohmann::json::object();
};

// passed is set from residual <= tolerance (NaN fails).
Report make_report(std::string name, double residual, double tolerance,
                   nlohmann::json context = nlohmann::json::object());

}  // namespace dysonprop
