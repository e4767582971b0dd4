#pragma once

#include <string>

namespace crowdsim {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;        // bad flags, config, or schema
inline constexpr int kExitRuntime = 2;       // failures while executing
inline constexpr int kExitVerification = 3;  // a property suite failed

// Runs the configured Monte Carlo sweep and writes the CSV to the config's
// output (or `output_override` when non-empty, "-" = stdout). A file left
// half-written by an I/O failure is removed.
int cmd_run(const std::string& config_path, const std::string& output_override,
            int threads);

// Prints the greedy degree matrix, per-class totals, the objective value and
// the tail of the greedy trace for a single-point config; optionally writes
// the matrix to `matrix_csv`.
int cmd_allocate(const std::string& config_path, const std::string& matrix_csv,
                 int trace_tail);

// Runs the numerical property suites (all of them, or one by name) and
// prints one pass/fail line per suite.
int cmd_verify(const std::string& suite_name);

}  // namespace crowdsim
