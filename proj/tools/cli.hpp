#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dysonprop::cli {

// Exit statuses of run().
inline constexpr int kOk = 0;
inline constexpr int kChecksFailed = 1;
inline constexpr int kSchemaError = 2;
inline constexpr int kAssumptionError = 3;
inline constexpr int kTruncationError = 4;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& data);

}  // namespace dysonprop::cli
