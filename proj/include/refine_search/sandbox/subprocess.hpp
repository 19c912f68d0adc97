#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <sys/types.h>

namespace refine_search::sandbox {

/// A child process with line-oriented pipes on stdin/stdout. The child runs
/// in its own process group so that killing it also reaps anything it
/// spawned. Destruction kills and waits.
class Subprocess {
public:
    explicit Subprocess(const std::vector<std::string>& argv);
    ~Subprocess();

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;
    Subprocess(Subprocess&& other) noexcept;
    Subprocess& operator=(Subprocess&& other) noexcept;

    /// False if the pipe is closed.
    bool write_line(const std::string& line);

    /// Next line without its newline, or nullopt on EOF or deadline.
    std::optional<std::string> read_line(std::chrono::steady_clock::time_point deadline);

    /// True once the child closed its stdout.
    [[nodiscard]] bool at_eof() const { return eof_; }
    [[nodiscard]] bool alive();
    [[nodiscard]] pid_t pid() const { return pid_; }

    void kill();

private:
    void close_all();

    pid_t pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    std::string buffer_;
    bool eof_ = false;
};

}  // namespace refine_search::sandbox
