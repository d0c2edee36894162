#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace scg {

struct ExecSpec {
    std::vector<std::string> argv;  ///< argv[0] resolved via PATH
    std::filesystem::path workdir;  ///< empty = inherit
    double timeout_s = 60.0;
    std::size_t output_cap_bytes = 16 * 1024;
};

struct ExecResult {
    enum class End { Exited, Signaled, TimedOut, SpawnFailed };
    End end = End::Exited;
    int exit_code = -1;       ///< valid when end == Exited
    int term_signal = 0;      ///< valid when end == Signaled
    std::string output;       ///< combined stdout+stderr, capped
    bool output_truncated = false;
    std::string spawn_error;  ///< valid when end == SpawnFailed
    double duration_s = 0.0;
};

/// Runs argv directly (no shell). The child gets its own process group,
/// which is killed wholesale on timeout. Combined output is captured up to
/// the cap; the pipe keeps draining past the cap so the child never blocks.
ExecResult run_process(const ExecSpec& spec);

/// Splits a command template on whitespace and replaces whole-token
/// occurrences of {name} placeholders from `substitutions`. No quoting or
/// escaping is interpreted; a placeholder value becomes exactly one token.
std::vector<std::string> split_command(
    const std::string& command_template,
    const std::vector<std::pair<std::string, std::string>>& substitutions);

/// Caps concurrent run_process children across all threads. `limit` <= 0
/// resets to the hardware concurrency default.
void set_process_slots(int limit);

}  // namespace scg
