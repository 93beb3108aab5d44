#pragma once

#include <string>

namespace riskbounds::cli {

// Runs a JSON job description and returns the process exit code:
// 0 success, 1 configuration error, 2 computational failure.
// The result document (or error report) is written to *out_json when given,
// and to the "output" path of the config when present.
int run_from_string(const std::string& config_json, std::string* out_json = nullptr);
int run_from_file(const std::string& config_path, std::string* out_json = nullptr);

// Command-line entry used by the binary. `command` may be empty, in which
// case the config's own "command" field applies. `sweep` has the form
// "s=from:to:step" and only affects the compare command.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& output_path, const std::string& sweep, int jobs);

} // namespace riskbounds::cli
