#pragma once

#include "refine_search/core/types.hpp"
#include "refine_search/sandbox/subprocess.hpp"

#include <nlohmann/json.hpp>

#include <condition_variable>
#include <memory>
#include <mutex>

namespace refine_search::sandbox {

enum class TestStatus { pass, fail, error, timeout };

std::string_view to_string(TestStatus status);
TestStatus test_status_from_string(std::string_view text);

struct ExecRequest {
    std::string request_id;
    std::string code;
    std::vector<TestCase> tests;
    int timeout_ms = 5000;
    std::optional<std::string> entry_point;
};

struct TestOutcome {
    std::string test_id;
    TestStatus status = TestStatus::error;
    std::optional<std::string> detail;

    friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct ExecResult {
    std::string request_id;
    std::vector<TestOutcome> per_test;

    [[nodiscard]] int passed() const;
    [[nodiscard]] bool all_passed() const { return !per_test.empty() && passed() == static_cast<int>(per_test.size()); }
};

class SandboxUnavailable : public Error {
public:
    using Error::Error;
};

/// Wire encoding of the runner protocol (one JSON object per line).
nlohmann::json encode_request(const ExecRequest& request);
ExecRequest decode_request(const nlohmann::json& doc);
nlohmann::json encode_result(const ExecResult& result);

/// Parses a response line and checks it against the request: matching
/// request_id and exactly the requested test ids in order. Returns nullopt
/// on any mismatch.
std::optional<ExecResult> decode_result(std::string_view line, const ExecRequest& request);

/// Every requested test marked with `status` and `detail`.
ExecResult uniform_result(const ExecRequest& request, TestStatus status, std::string detail);

/// Executes candidate code against tests.
class Executor {
public:
    virtual ~Executor() = default;
    virtual ExecResult run(const ExecRequest& request) = 0;

    /// Builds a request with a fresh id and runs it.
    ExecResult evaluate(const std::string& code, const std::vector<TestCase>& tests, int timeout_ms,
                        const std::optional<std::string>& entry_point = std::nullopt);

private:
    std::mutex id_mutex_;
    std::uint64_t next_id_ = 0;
};

/// #pass / #tests.
double validation_score(const ExecResult& result);

/// True iff every hidden test passes.
bool hidden_verdict(Executor& executor, const std::string& code, const Task& task, int timeout_ms);

inline constexpr int kDefaultTimeoutMs = 5000;

struct RunnerOptions {
    std::vector<std::string> command{"exec-runner"};
    int pool_size = 2;
    /// Extra time allowed on top of a request's timeout before the runner is
    /// declared hung, killed, and every test reported as timed out.
    int grace_ms = 1000;
    int startup_timeout_ms = 10000;
};

/// Pool of exec-runner subprocesses speaking newline-delimited JSON on
/// stdio. Runners start lazily, are restarted after a crash or hang, and
/// serve one request at a time. A crash mid-request yields error statuses.
class RunnerPool final : public Executor {
public:
    explicit RunnerPool(RunnerOptions options);
    ~RunnerPool() override;

    ExecResult run(const ExecRequest& request) override;

    [[nodiscard]] const RunnerOptions& options() const { return options_; }
    [[nodiscard]] int restarts() const;

private:
    struct Slot {
        std::unique_ptr<Subprocess> process;
        bool busy = false;
    };

    std::size_t acquire();
    void release(std::size_t index);
    void start(Slot& slot);
    ExecResult run_on(Slot& slot, const ExecRequest& request);

    RunnerOptions options_;
    std::vector<Slot> slots_;
    mutable std::mutex mutex_;
    std::condition_variable idle_;
    int restarts_ = 0;
};

}  // namespace refine_search::sandbox
