#include "scg/sandbox_runner.hpp"

#include <atomic>
#include <fstream>
#include <random>

#include "scg/errors.hpp"
#include "scg/subprocess.hpp"

namespace scg {

namespace {

std::filesystem::path unique_workspace_dir(const std::filesystem::path& parent) {
    static std::atomic<unsigned> counter{0};
    static thread_local std::mt19937_64 rng(std::random_device{}());
    for (int attempt = 0; attempt < 16; ++attempt) {
        unsigned seq = counter.fetch_add(1);
        char suffix[24];
        std::snprintf(suffix, sizeof suffix, "%04u-%04x", seq,
                      static_cast<unsigned>(rng() & 0xffff));
        std::filesystem::path dir = parent / (std::string("ws-") + suffix);
        std::error_code ec;
        if (std::filesystem::create_directory(dir, ec)) return dir;
    }
    throw SandboxError("cannot create a workspace directory under " +
                       parent.string());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SandboxError("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw SandboxError("short write to " + path.string());
}

}  // namespace

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Passed: return "passed";
        case RunStatus::Failed: return "failed";
        case RunStatus::CompileError: return "compile_error";
        case RunStatus::Timeout: return "timeout";
        case RunStatus::Crash: return "crash";
    }
    return "unknown";
}

Workspace materialize_workspace(const CodingTask& task, const CodeSample& code,
                                const TestSuite& tests,
                                const std::filesystem::path& parent) {
    if (code.source.empty()) throw SandboxError("empty code sample");
    if (tests.script.empty()) throw SandboxError("empty test suite");
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);

    Workspace ws;
    ws.root = unique_workspace_dir(parent);
    write_file(ws.task_path(), code.source + "\n" + task.entrypoint);
    write_file(ws.test_path(), tests.script);
    return ws;
}

CompileResult compile(const Workspace& ws, const SandboxConfig& config) {
    ExecSpec spec;
    spec.argv = split_command(config.compile_cmd,
                              {{"src", ws.task_file_name},
                               {"out", ws.executable_file_name}});
    spec.workdir = ws.root;
    spec.timeout_s = config.compile_timeout_s;
    spec.output_cap_bytes = config.output_cap_bytes;

    ExecResult r = run_process(spec);
    CompileResult result;
    result.duration_s = r.duration_s;
    switch (r.end) {
        case ExecResult::End::SpawnFailed:
            throw SandboxError("compiler unavailable: " + r.spawn_error);
        case ExecResult::End::TimedOut:
            result.ok = false;
            result.diagnostics = "compilation timed out\n" + r.output;
            return result;
        case ExecResult::End::Signaled:
            result.ok = false;
            result.diagnostics = "compiler terminated by signal " +
                                 std::to_string(r.term_signal) + "\n" +
                                 r.output;
            return result;
        case ExecResult::End::Exited:
            result.ok = r.exit_code == 0;
            result.diagnostics = r.output;
            return result;
    }
    throw SandboxError("unreachable compile outcome");
}

TestRunOutcome run_tests(const Workspace& ws, const SandboxConfig& config) {
    TestRunOutcome outcome;
    if (!std::filesystem::exists(ws.executable_path())) {
        outcome.status = RunStatus::CompileError;
        outcome.diagnostics = "executable " + ws.executable_file_name +
                              " is missing; compilation did not succeed";
        return outcome;
    }

    ExecSpec spec;
    spec.argv = split_command(config.test_cmd, {{"test", ws.test_file_name}});
    spec.workdir = ws.root;
    spec.timeout_s = config.test_timeout_s;
    spec.output_cap_bytes = config.output_cap_bytes;

    ExecResult r = run_process(spec);
    outcome.duration_s = r.duration_s;
    outcome.diagnostics = r.output;
    switch (r.end) {
        case ExecResult::End::SpawnFailed:
            throw SandboxError("test interpreter unavailable: " +
                               r.spawn_error);
        case ExecResult::End::TimedOut:
            outcome.status = RunStatus::Timeout;
            if (outcome.diagnostics.empty()) {
                outcome.diagnostics = "test run exceeded the time budget";
            }
            return outcome;
        case ExecResult::End::Signaled:
            outcome.status = RunStatus::Crash;
            outcome.diagnostics += "\ntest process terminated by signal " +
                                   std::to_string(r.term_signal);
            return outcome;
        case ExecResult::End::Exited:
            if (r.exit_code == 0) {
                outcome.status = RunStatus::Passed;
            } else if (r.exit_code == 1) {
                outcome.status = RunStatus::Failed;
            } else {
                outcome.status = RunStatus::Crash;
                outcome.diagnostics += "\ntest process exited with code " +
                                       std::to_string(r.exit_code);
            }
            return outcome;
    }
    throw SandboxError("unreachable test outcome");
}

TestRunOutcome execute_suite(const Workspace& ws, const SandboxConfig& config) {
    CompileResult cr = compile(ws, config);
    if (!cr.ok) {
        TestRunOutcome outcome;
        outcome.status = RunStatus::CompileError;
        outcome.diagnostics = cr.diagnostics.empty()
                                  ? "compilation failed"
                                  : cr.diagnostics;
        outcome.duration_s = cr.duration_s;
        return outcome;
    }
    TestRunOutcome outcome = run_tests(ws, config);
    outcome.duration_s += cr.duration_s;
    return outcome;
}

}  // namespace scg
