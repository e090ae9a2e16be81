#include "lplh/adapter_env.hpp"

#include "lplh/errors.hpp"

#include <nlohmann/json.hpp>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace lplh {

using nlohmann::json;

AdapterEnv::AdapterEnv(std::string command_line, int timeout_ms)
    : command_line_(std::move(command_line)), timeout_ms_(timeout_ms) {}

AdapterEnv::~AdapterEnv() { shutdown(); }

void AdapterEnv::launch() {
    signal(SIGPIPE, SIG_IGN); // a dead child must surface as EnvUnavailable
    shutdown();
    int to_pipe[2], from_pipe[2];
    if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0)
        throw EnvUnavailable("pipe() failed: " + std::string(strerror(errno)));
    pid_t pid = fork();
    if (pid < 0) throw EnvUnavailable("fork() failed");
    if (pid == 0) {
        // Own process group, so shutdown() can reach grandchildren spawned by
        // the shell and no orphan keeps our caller's pipes open.
        setpgid(0, 0);
        dup2(to_pipe[0], STDIN_FILENO);
        dup2(from_pipe[1], STDOUT_FILENO);
        close(to_pipe[0]);
        close(to_pipe[1]);
        close(from_pipe[0]);
        close(from_pipe[1]);
        execl("/bin/sh", "sh", "-c", command_line_.c_str(), (char*)nullptr);
        _exit(127);
    }
    close(to_pipe[0]);
    close(from_pipe[1]);
    child_pid_ = pid;
    to_child_ = to_pipe[1];
    from_child_ = from_pipe[0];
    read_buffer_.clear();
}

void AdapterEnv::shutdown() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (child_pid_ > 0) {
        kill(-child_pid_, SIGTERM);
        int status = 0;
        for (int i = 0; i < 20; ++i) {
            if (waitpid(child_pid_, &status, WNOHANG) != 0) break;
            usleep(10'000);
        }
        kill(-child_pid_, SIGKILL);
        waitpid(child_pid_, &status, WNOHANG);
        child_pid_ = -1;
    }
}

std::string AdapterEnv::request(const std::string& line) {
    if (to_child_ < 0) throw EnvUnavailable("adapter process is not running");
    std::string msg = line + "\n";
    ssize_t written = write(to_child_, msg.data(), msg.size());
    if (written != static_cast<ssize_t>(msg.size()))
        throw EnvUnavailable("adapter write failed");

    while (true) {
        size_t nl = read_buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string out = read_buffer_.substr(0, nl);
            read_buffer_.erase(0, nl + 1);
            return out;
        }
        struct pollfd pfd{from_child_, POLLIN, 0};
        int rc = poll(&pfd, 1, timeout_ms_);
        if (rc == 0) throw EnvUnavailable("adapter response timed out");
        if (rc < 0) throw EnvUnavailable("adapter poll failed");
        char buf[4096];
        ssize_t n = read(from_child_, buf, sizeof(buf));
        if (n <= 0) throw EnvUnavailable("adapter closed its output");
        read_buffer_.append(buf, static_cast<size_t>(n));
    }
}

StepOutcome AdapterEnv::to_outcome(const std::string& response_line) {
    json j;
    try {
        j = json::parse(response_line);
    } catch (const json::exception& e) {
        throw EnvUnavailable("adapter sent invalid JSON: " + std::string(e.what()));
    }
    StepOutcome out;
    out.observation = j.value("observation", "");
    out.score = j.value("score", 0);
    out.moves = j.value("moves", 0);
    out.terminal = j.value("done", false);
    out.score_delta = out.score - last_score_;
    last_score_ = out.score;
    // the wire protocol carries no terminal kind; infer the generic case
    out.terminal_kind = out.terminal ? TerminalKind::step_limit : TerminalKind::none;
    return out;
}

StepOutcome AdapterEnv::reset(uint64_t /*seed*/) {
    try {
        launch();
        last_score_ = 0;
        StepOutcome out = to_outcome(request(R"({"type":"reset"})"));
        out.score_delta = 0;
        terminal_ = out.terminal;
        return out;
    } catch (const EnvUnavailable&) {
        shutdown();
        throw;
    }
}

StepOutcome AdapterEnv::step(const std::string& command) {
    if (terminal_) throw EpisodeOver("step after terminal state");
    json req{{"type", "step"}, {"command", command}};
    StepOutcome out = to_outcome(request(req.dump()));
    terminal_ = out.terminal;
    return out;
}

} // namespace lplh
