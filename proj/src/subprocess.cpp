#include "scg/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

#include "scg/errors.hpp"

namespace scg {

namespace {

class ProcessSlots {
public:
    void set_limit(int limit) {
        std::lock_guard lock(mu_);
        limit_ = limit > 0 ? limit : default_limit();
    }

    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return in_use_ < limit_; });
        ++in_use_;
    }

    void release() {
        {
            std::lock_guard lock(mu_);
            --in_use_;
        }
        cv_.notify_one();
    }

private:
    static int default_limit() {
        unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 4;
    }

    std::mutex mu_;
    std::condition_variable cv_;
    int limit_ = default_limit();
    int in_use_ = 0;
};

ProcessSlots& slots() {
    static ProcessSlots instance;
    return instance;
}

struct SlotGuard {
    SlotGuard() { slots().acquire(); }
    ~SlotGuard() { slots().release(); }
};

void append_capped(std::string& out, const char* data, ssize_t len,
                   std::size_t cap, bool& truncated) {
    if (out.size() >= cap) {
        truncated = true;
        return;
    }
    std::size_t room = cap - out.size();
    std::size_t take = static_cast<std::size_t>(len);
    if (take > room) {
        take = room;
        truncated = true;
    }
    out.append(data, take);
}

}  // namespace

void set_process_slots(int limit) { slots().set_limit(limit); }

std::vector<std::string> split_command(
    const std::string& command_template,
    const std::vector<std::pair<std::string, std::string>>& substitutions) {
    std::vector<std::string> argv;
    std::istringstream in(command_template);
    std::string token;
    while (in >> token) {
        for (const auto& [name, value] : substitutions) {
            if (token == "{" + name + "}") {
                token = value;
                break;
            }
        }
        argv.push_back(token);
    }
    return argv;
}

ExecResult run_process(const ExecSpec& spec) {
    if (spec.argv.empty()) {
        throw SandboxError("run_process: empty argv");
    }
    SlotGuard slot;

    int out_pipe[2];
    if (pipe(out_pipe) != 0) {
        throw SandboxError(std::string("pipe: ") + std::strerror(errno));
    }
    // Exec failures are reported through a dedicated close-on-exec pipe so
    // they are never confused with the child's own exit codes.
    int err_pipe[2];
    if (pipe(err_pipe) != 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        throw SandboxError(std::string("pipe: ") + std::strerror(errno));
    }
    fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

    auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        throw SandboxError(std::string("fork: ") + std::strerror(errno));
    }

    if (pid == 0) {
        setpgid(0, 0);
        close(out_pipe[0]);
        close(err_pipe[0]);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(out_pipe[1], STDERR_FILENO);
        close(out_pipe[1]);
        if (!spec.workdir.empty() &&
            chdir(spec.workdir.c_str()) != 0) {
            int e = errno;
            (void)!write(err_pipe[1], &e, sizeof e);
            _exit(127);
        }
        std::vector<char*> argv;
        argv.reserve(spec.argv.size() + 1);
        for (const std::string& a : spec.argv) {
            argv.push_back(const_cast<char*>(a.c_str()));
        }
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        int e = errno;
        (void)!write(err_pipe[1], &e, sizeof e);
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    ExecResult result;
    auto deadline =
        start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(spec.timeout_s));

    char buf[4096];
    bool timed_out = false;
    for (;;) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            timed_out = true;
            break;
        }
        int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                                  now)
                .count());
        if (wait_ms < 1) wait_ms = 1;
        struct pollfd pfd = {out_pipe[0], POLLIN, 0};
        int rc = poll(&pfd, 1, wait_ms);
        if (rc == 0) continue;  // re-check deadline
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        ssize_t n = read(out_pipe[0], buf, sizeof buf);
        if (n > 0) {
            append_capped(result.output, buf, n, spec.output_cap_bytes,
                          result.output_truncated);
            continue;
        }
        break;  // EOF or read error: child closed its end
    }

    int status = 0;
    if (!timed_out) {
        // EOF reached; the child may still be running with stdout closed,
        // so the wait stays bounded by the same deadline.
        for (;;) {
            pid_t w = waitpid(pid, &status, WNOHANG);
            if (w == pid) break;
            if (w < 0 && errno != EINTR) break;
            if (std::chrono::steady_clock::now() >= deadline) {
                timed_out = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
    }

    if (timed_out) {
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
        // Drain whatever the group produced before dying.
        for (;;) {
            ssize_t n = read(out_pipe[0], buf, sizeof buf);
            if (n <= 0) break;
            append_capped(result.output, buf, n, spec.output_cap_bytes,
                          result.output_truncated);
        }
        while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
        }
    }
    close(out_pipe[0]);

    int exec_errno = 0;
    ssize_t got = read(err_pipe[0], &exec_errno, sizeof exec_errno);
    close(err_pipe[0]);

    result.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    if (got == sizeof exec_errno) {
        result.end = ExecResult::End::SpawnFailed;
        result.spawn_error = spec.argv[0] + ": " + std::strerror(exec_errno);
        return result;
    }
    if (timed_out) {
        result.end = ExecResult::End::TimedOut;
        return result;
    }
    if (WIFEXITED(status)) {
        result.end = ExecResult::End::Exited;
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.end = ExecResult::End::Signaled;
        result.term_signal = WTERMSIG(status);
    } else {
        result.end = ExecResult::End::Signaled;
        result.term_signal = 0;
    }
    return result;
}

}  // namespace scg
