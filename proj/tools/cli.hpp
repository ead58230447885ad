#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rfcw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr int kConfigSchemaVersion = 1;

/// Runs one command line (args exclude the program name). Machine output
/// goes to the --out file when given, otherwise to `out`; the one-line
/// summary goes to `out` when a file was written and to `err` otherwise.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

/// JSON text with every floating-point number printed to 17 significant digits.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// %.17g
std::string format_double(double v);

}  // namespace rfcw::cli
