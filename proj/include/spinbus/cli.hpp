#pragma once
#include <filesystem>
#include <string>

namespace spinbus {

inline constexpr const char* kToolVersion = "spinbus 1.0.0";

// Exit codes: 0 success, 2 validation/domain error, 3 capacity/convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCapacity = 3;

// Parse + strictly validate config text (unknown fields rejected, physical
// preconditions checked before any compute). DomainError on violations.
// Returns the normalized config as canonical JSON text with defaults filled.
std::string validate_config_text(const std::string& json_text);

// Parse + validate a config file, run the experiment, write outputs and
// manifest.json into the resolved output directory. Returns the exit code and
// prints diagnostics to stderr on failure. output_override empty -> config's
// output_dir or ./<experiment>_<timestamp>. A non-empty expected_experiment
// must match the config's experiment field.
int run_experiment_file(const std::filesystem::path& config_path,
                        const std::string& expected_experiment,
                        const std::string& output_override, int threads);

// Human-readable experiment table, or JSON parameter schemas. A non-empty
// `only` restricts to one experiment; unknown name returns kExitValidation.
int list_experiments(bool json_mode, const std::string& only = "");

} // namespace spinbus
