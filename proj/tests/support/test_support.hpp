#pragma once

#include "refine_search/core/types.hpp"
#include "refine_search/sandbox/sandbox.hpp"

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace rs_test {

namespace fs = std::filesystem;

inline const fs::path kRepoDir = RS_REPO_DIR;

inline std::vector<std::string> stub_runner_command() { return {RS_PYTHON, RS_STUB_RUNNER}; }

inline refine_search::sandbox::RunnerOptions stub_runner_options(int pool_size = 1) {
    refine_search::sandbox::RunnerOptions o;
    o.command = stub_runner_command();
    o.pool_size = pool_size;
    return o;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("rs_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

/// In-process executor: a test passes iff the code contains "PASS:<test_id>"
/// or "PASS:ALL". Counts requests.
class FakeExecutor final : public refine_search::sandbox::Executor {
public:
    refine_search::sandbox::ExecResult run(const refine_search::sandbox::ExecRequest& request) override {
        ++requests;
        refine_search::sandbox::ExecResult r;
        r.request_id = request.request_id;
        const bool all = request.code.find("PASS:ALL") != std::string::npos;
        for (const auto& t : request.tests) {
            const bool ok = all || request.code.find("PASS:" + t.test_id + ";") != std::string::npos;
            r.per_test.push_back({t.test_id, ok ? refine_search::sandbox::TestStatus::pass
                                                : refine_search::sandbox::TestStatus::fail,
                                  ok ? std::nullopt : std::optional<std::string>("assertion failed")});
        }
        return r;
    }
    std::atomic<int> requests{0};
};

/// Builds a trace from (parent, depth-implied) shapes: parents[i] is the
/// parent id of node i + 1, or 0 for an initial code.
inline refine_search::SearchTrace make_trace(const std::vector<int>& parents, int budget_k = 16,
                                             std::string task_id = "t") {
    refine_search::SearchTrace tr;
    tr.task_id = std::move(task_id);
    tr.label = "synthetic";
    tr.budget_k = budget_k;
    for (std::size_t i = 0; i < parents.size(); ++i) {
        refine_search::CandidateNode n;
        n.node_id = static_cast<int>(i) + 1;
        n.source = "code " + std::to_string(i + 1);
        if (parents[i] > 0) {
            n.parent = parents[i];
            n.depth = tr.nodes[static_cast<std::size_t>(parents[i] - 1)].depth + 1;
            n.direction_used = refine_search::TextualDirection{"dir " + std::to_string(i + 1), std::nullopt, true};
        }
        tr.nodes.push_back(std::move(n));
    }
    return tr;
}

/// Random well-formed parent vector of length n.
inline std::vector<int> random_parents(std::mt19937_64& gen, int n) {
    std::vector<int> parents(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i);
        parents[static_cast<std::size_t>(i)] = pick(gen);
    }
    return parents;
}

}  // namespace rs_test
