#include "refine_search/sandbox/subprocess.hpp"

#include "refine_search/core/types.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace refine_search::sandbox {

namespace {

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw Error("empty runner command");
    ignore_sigpipe();

    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(fmt::format("pipe: {}", std::strerror(errno)));
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw Error(fmt::format("pipe: {}", std::strerror(errno)));
    }

    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_ = fork();
    if (pid_ < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
        throw Error(fmt::format("fork: {}", std::strerror(errno)));
    }
    if (pid_ == 0) {
        setpgid(0, 0);
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        execvp(args[0], args.data());
        _exit(127);
    }
    setpgid(pid_, pid_);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    stdin_fd_ = in_pipe[1];
    stdout_fd_ = out_pipe[0];
}

Subprocess::~Subprocess() { kill(); }

Subprocess::Subprocess(Subprocess&& other) noexcept
    : pid_(std::exchange(other.pid_, -1)),
      stdin_fd_(std::exchange(other.stdin_fd_, -1)),
      stdout_fd_(std::exchange(other.stdout_fd_, -1)),
      buffer_(std::move(other.buffer_)),
      eof_(other.eof_) {}

Subprocess& Subprocess::operator=(Subprocess&& other) noexcept {
    if (this != &other) {
        kill();
        pid_ = std::exchange(other.pid_, -1);
        stdin_fd_ = std::exchange(other.stdin_fd_, -1);
        stdout_fd_ = std::exchange(other.stdout_fd_, -1);
        buffer_ = std::move(other.buffer_);
        eof_ = other.eof_;
    }
    return *this;
}

bool Subprocess::write_line(const std::string& line) {
    if (stdin_fd_ < 0) return false;
    std::string data = line;
    data += '\n';
    std::size_t off = 0;
    while (off < data.size()) {
        const auto n = ::write(stdin_fd_, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> Subprocess::read_line(std::chrono::steady_clock::time_point deadline) {
    using namespace std::chrono;
    for (;;) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            auto line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        if (eof_ || stdout_fd_ < 0) return std::nullopt;
        const auto remaining = duration_cast<milliseconds>(deadline - steady_clock::now()).count();
        if (remaining <= 0) return std::nullopt;
        pollfd pfd{stdout_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 1000)));
        if (rc < 0 && errno != EINTR) return std::nullopt;
        if (rc <= 0) continue;
        char chunk[8192];
        const auto n = ::read(stdout_fd_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            eof_ = true;
        } else if (n == 0) {
            eof_ = true;
        } else {
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }
}

bool Subprocess::alive() {
    if (pid_ <= 0) return false;
    int status = 0;
    const auto rc = waitpid(pid_, &status, WNOHANG);
    if (rc == 0) return true;
    pid_ = -1;
    close_all();
    return false;
}

void Subprocess::kill() {
    if (pid_ > 0) {
        ::kill(-pid_, SIGKILL);
        ::kill(pid_, SIGKILL);
        int status = 0;
        while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        pid_ = -1;
    }
    close_all();
}

void Subprocess::close_all() {
    if (stdin_fd_ >= 0) ::close(std::exchange(stdin_fd_, -1));
    if (stdout_fd_ >= 0) ::close(std::exchange(stdout_fd_, -1));
}

}  // namespace refine_search::sandbox
