#ifndef RIGIDGEN_CLI_HPP
#define RIGIDGEN_CLI_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rigidgen::cli {

inline constexpr std::string_view kReportSchema = "rigidgen-report/1";

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

/// Parses argv, runs one subcommand and writes its report to out.
/// Returns 0 on pass, 1 on a verified failure, 2 on usage, configuration or input errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Problems found when checking a report against rigidgen-report/1; empty when it conforms.
std::vector<std::string> validate_report(const nlohmann::json& report);

}  // namespace rigidgen::cli

#endif
