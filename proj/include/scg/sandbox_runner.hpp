#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "scg/types.hpp"

namespace scg {

struct SandboxConfig {
    std::string compile_cmd = "cc {src} -o {out} -lm";
    std::string test_cmd = "python3 {test}";
    double compile_timeout_s = 30.0;
    double test_timeout_s = 60.0;
    std::size_t output_cap_bytes = 16 * 1024;
};

/// A per-attempt scratch directory. The file names are the same ones
/// substituted into the test-generation prompt, so what the model is told
/// matches what lands on disk.
struct Workspace {
    std::filesystem::path root;
    std::string task_file_name = "task.c";
    std::string executable_file_name = "task";
    std::string test_file_name = "test_task.py";

    std::filesystem::path task_path() const { return root / task_file_name; }
    std::filesystem::path executable_path() const {
        return root / executable_file_name;
    }
    std::filesystem::path test_path() const { return root / test_file_name; }
};

struct CompileResult {
    bool ok = false;
    std::string diagnostics;
    double duration_s = 0.0;
};

enum class RunStatus { Passed, Failed, CompileError, Timeout, Crash };

std::string_view to_string(RunStatus status);

struct TestRunOutcome {
    RunStatus status = RunStatus::Failed;
    std::string diagnostics;  ///< the "error" text fed back to the model
    double duration_s = 0.0;
};

/// Creates a fresh directory under `parent` holding exactly two files: the
/// task source (generated code, a separator newline, then the task
/// entrypoint) and the test script. Throws SandboxError on filesystem
/// failure or empty inputs.
Workspace materialize_workspace(const CodingTask& task, const CodeSample& code,
                                const TestSuite& tests,
                                const std::filesystem::path& parent);

/// Runs the configured compiler command with {src} and {out} substituted,
/// in ws.root. A failed compile (including a compile timeout) is an ok=false
/// result; a missing compiler is a SandboxError.
CompileResult compile(const Workspace& ws, const SandboxConfig& config);

/// Runs the configured test command with {test} substituted, in ws.root.
/// Exit 0 -> passed, exit 1 -> failed, other exits and signals -> crash,
/// deadline -> timeout. Returns compile_error without running when the
/// executable is absent. A missing interpreter is a SandboxError.
TestRunOutcome run_tests(const Workspace& ws, const SandboxConfig& config);

/// compile + run_tests, mapping a failed compile to a compile_error outcome
/// carrying the compiler diagnostics.
TestRunOutcome execute_suite(const Workspace& ws, const SandboxConfig& config);

}  // namespace scg
