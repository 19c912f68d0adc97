#include "refine_search/sandbox/sandbox.hpp"

#include "refine_search/core/trace_io.hpp"

#include <fmt/format.h>

namespace refine_search::sandbox {

using nlohmann::json;

std::string_view to_string(TestStatus status) {
    switch (status) {
        case TestStatus::pass: return "pass";
        case TestStatus::fail: return "fail";
        case TestStatus::error: return "error";
        case TestStatus::timeout: return "timeout";
    }
    return "error";
}

TestStatus test_status_from_string(std::string_view text) {
    if (text == "pass") return TestStatus::pass;
    if (text == "fail") return TestStatus::fail;
    if (text == "error") return TestStatus::error;
    if (text == "timeout") return TestStatus::timeout;
    throw Error(fmt::format("unknown test status '{}'", text));
}

int ExecResult::passed() const {
    int n = 0;
    for (const auto& t : per_test) n += t.status == TestStatus::pass ? 1 : 0;
    return n;
}

json encode_request(const ExecRequest& request) {
    json j{{"request_id", request.request_id},
           {"code", request.code},
           {"tests", request.tests},
           {"timeout_ms", request.timeout_ms}};
    j["entry_point"] = request.entry_point ? json(*request.entry_point) : json(nullptr);
    return j;
}

ExecRequest decode_request(const json& doc) {
    ExecRequest r;
    doc.at("request_id").get_to(r.request_id);
    doc.at("code").get_to(r.code);
    doc.at("tests").get_to(r.tests);
    doc.at("timeout_ms").get_to(r.timeout_ms);
    if (doc.contains("entry_point") && !doc["entry_point"].is_null()) r.entry_point = doc["entry_point"].get<std::string>();
    return r;
}

json encode_result(const ExecResult& result) {
    json per = json::array();
    for (const auto& t : result.per_test) {
        json e{{"test_id", t.test_id}, {"status", to_string(t.status)}};
        e["detail"] = t.detail ? json(*t.detail) : json(nullptr);
        per.push_back(std::move(e));
    }
    return json{{"request_id", result.request_id}, {"per_test", std::move(per)}};
}

std::optional<ExecResult> decode_result(std::string_view line, const ExecRequest& request) {
    try {
        const auto doc = json::parse(line);
        ExecResult r;
        doc.at("request_id").get_to(r.request_id);
        if (r.request_id != request.request_id) return std::nullopt;
        const auto& per = doc.at("per_test");
        if (!per.is_array() || per.size() != request.tests.size()) return std::nullopt;
        for (std::size_t i = 0; i < per.size(); ++i) {
            TestOutcome o;
            per[i].at("test_id").get_to(o.test_id);
            if (o.test_id != request.tests[i].test_id) return std::nullopt;
            o.status = test_status_from_string(per[i].at("status").get<std::string>());
            if (per[i].contains("detail") && !per[i]["detail"].is_null()) {
                o.detail = per[i]["detail"].is_string() ? per[i]["detail"].get<std::string>() : per[i]["detail"].dump();
            }
            r.per_test.push_back(std::move(o));
        }
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

ExecResult uniform_result(const ExecRequest& request, TestStatus status, std::string detail) {
    ExecResult r;
    r.request_id = request.request_id;
    for (const auto& t : request.tests) r.per_test.push_back({t.test_id, status, detail});
    return r;
}

ExecResult Executor::evaluate(const std::string& code, const std::vector<TestCase>& tests, int timeout_ms,
                              const std::optional<std::string>& entry_point) {
    if (tests.empty()) throw Error("evaluate needs at least one test");
    if (timeout_ms <= 0) throw Error("timeout_ms must be > 0");
    ExecRequest req;
    {
        std::lock_guard lock(id_mutex_);
        req.request_id = fmt::format("req-{}", ++next_id_);
    }
    req.code = code;
    req.tests = tests;
    req.timeout_ms = timeout_ms;
    req.entry_point = entry_point;
    return run(req);
}

double validation_score(const ExecResult& result) {
    if (result.per_test.empty()) return 0.0;
    return static_cast<double>(result.passed()) / static_cast<double>(result.per_test.size());
}

bool hidden_verdict(Executor& executor, const std::string& code, const Task& task, int timeout_ms) {
    if (task.hidden_tests.empty()) throw Error(fmt::format("task {} has no hidden tests", task.task_id));
    return executor.evaluate(code, task.hidden_tests, timeout_ms, task.entry_point).all_passed();
}

RunnerPool::RunnerPool(RunnerOptions options) : options_(std::move(options)) {
    if (options_.pool_size < 1) throw Error("runner pool size must be >= 1");
    if (options_.command.empty()) throw Error("runner command is empty");
    slots_.resize(static_cast<std::size_t>(options_.pool_size));
}

RunnerPool::~RunnerPool() = default;

int RunnerPool::restarts() const {
    std::lock_guard lock(mutex_);
    return restarts_;
}

std::size_t RunnerPool::acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            if (!slots_[i].busy) {
                slots_[i].busy = true;
                return i;
            }
        }
        idle_.wait(lock);
    }
}

void RunnerPool::release(std::size_t index) {
    {
        std::lock_guard lock(mutex_);
        slots_[index].busy = false;
    }
    idle_.notify_one();
}

void RunnerPool::start(Slot& slot) {
    using namespace std::chrono;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (slot.process) {
            std::lock_guard lock(mutex_);
            ++restarts_;
        }
        slot.process.reset();
        try {
            auto proc = std::make_unique<Subprocess>(options_.command);
            const auto line = proc->read_line(steady_clock::now() + milliseconds(options_.startup_timeout_ms));
            if (line) {
                const auto doc = json::parse(*line, nullptr, false);
                if (!doc.is_discarded() && doc.is_object() && doc.value("ready", false)) {
                    slot.process = std::move(proc);
                    return;
                }
            }
        } catch (const Error&) {
        }
        slot.process = nullptr;
    }
    throw SandboxUnavailable("sandbox unavailable");
}

ExecResult RunnerPool::run_on(Slot& slot, const ExecRequest& request) {
    using namespace std::chrono;
    if (!slot.process || !slot.process->alive()) start(slot);
    const auto line = encode_request(request).dump();
    if (!slot.process->write_line(line)) {
        start(slot);
        if (!slot.process->write_line(line)) throw SandboxUnavailable("sandbox unavailable");
    }
    const auto deadline = steady_clock::now() + milliseconds(request.timeout_ms + options_.grace_ms);
    const auto response = slot.process->read_line(deadline);
    if (!response) {
        // A closed stdout means the runner died; the exit may not be reapable yet.
        const bool hung = !slot.process->at_eof();
        slot.process->kill();
        slot.process.reset();
        if (hung) return uniform_result(request, TestStatus::timeout, "runner exceeded request timeout");
        return uniform_result(request, TestStatus::error, "runner crashed");
    }
    if (auto result = decode_result(*response, request)) return std::move(*result);
    slot.process->kill();
    slot.process.reset();
    return uniform_result(request, TestStatus::error, "malformed runner response");
}

ExecResult RunnerPool::run(const ExecRequest& request) {
    const auto index = acquire();
    try {
        auto result = run_on(slots_[index], request);
        release(index);
        return result;
    } catch (...) {
        release(index);
        throw;
    }
}

}  // namespace refine_search::sandbox
