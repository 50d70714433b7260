#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace cegan {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;      // overrides the config's seed
  std::optional<std::string> out_dir;     // overrides the config's output_dir
  std::size_t jobs = 1;
  std::string checkpoint_path;            // ite; defaults to <out>/checkpoint.json
  std::optional<std::string> corrupt_group;  // gradcheck test hook
};

// Each command writes its files under the output directory, prints a short
// summary to `out` and diagnostics to `err`. Errors propagate as exceptions.
void cmd_generate(const CommandOptions& options, std::ostream& out, std::ostream& err);
void cmd_train(const CommandOptions& options, std::ostream& out, std::ostream& err);
void cmd_ite(const CommandOptions& options, std::ostream& out, std::ostream& err);
void cmd_experiment(const CommandOptions& options, std::ostream& out, std::ostream& err);
// Returns false when any check exceeds tolerance.
bool cmd_gradcheck(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Parses argv, dispatches, and maps failures to exit codes: 0 success,
// 1 validation error (including bad arguments), 2 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cegan
