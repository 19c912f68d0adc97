#include "cli_config.hpp"

#include "refine_search/core/types.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <sys/wait.h>

using namespace refine_search;
using namespace refine_search::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
        if (const auto it = vars.find(name); it != vars.end()) return it->second;
        return std::nullopt;
    };
}

const ResolvedSetting& setting(const ResolvedConfig& c, const std::string& path) {
    for (const auto& s : c.settings) {
        if (s.path == path) return s;
    }
    FAIL("no setting " << path);
    throw;
}

struct CommandResult {
    int status = -1;
    std::string out;
};

// stdout of the CLI; stderr goes to /dev/null
CommandResult run_cli(const std::string& args) {
    const auto cmd = fmt::format("cd '{}' && '{}' {} 2>/dev/null", rs_test::kRepoDir.string(), RS_CLI_BINARY, args);
    CommandResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (const auto n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string stub_runner_flag() { return fmt::format("--runner '{} {}'", RS_PYTHON, RS_STUB_RUNNER); }

}  // namespace

TEST_CASE("settings precedence: flag over spec over env over default") {
    const auto spec = json::parse(R"({"seed": 7, "backend": {"kind": "mock"}})");
    const auto env = fake_env({{"REFINE_SEARCH_SEED", "9"},
                               {"REFINE_SEARCH_MODEL", "env-model"},
                               {"REFINE_SEARCH_BACKEND", "http"},
                               {"REFINE_SEARCH_RUNNER", "python3  runner.py"}});

    const auto none = resolve_config(spec, {}, env);
    CHECK(setting(none, "/seed").value == 7);
    CHECK(setting(none, "/seed").source == "spec");
    CHECK(setting(none, "/backend/kind").value == "mock");
    CHECK(setting(none, "/backend/model").value == "env-model");
    CHECK(setting(none, "/backend/model").source == "env");
    CHECK(setting(none, "/sandbox/command").value == json::array({"python3", "runner.py"}));
    CHECK(setting(none, "/runs").value == 1);
    CHECK(setting(none, "/runs").source == "default");
    CHECK(setting(none, "/backend/base_url").source == "unset");
    CHECK_FALSE(none.doc["backend"].contains("base_url"));
    CHECK(none.doc["backend"]["model"] == "env-model");

    const auto flagged = resolve_config(spec, {{"/seed", "11"}, {"/backend/model", "flag-model"}}, env);
    CHECK(setting(flagged, "/seed").value == 11);
    CHECK(setting(flagged, "/seed").source == "flag");
    CHECK(flagged.doc["seed"] == 11);
    CHECK(flagged.doc["backend"]["model"] == "flag-model");

    const auto no_env = resolve_config(json::object(), {}, fake_env({}));
    CHECK(setting(no_env, "/seed").value == 0);
    CHECK(setting(no_env, "/output").value == "out");
    CHECK(setting(no_env, "/sandbox/command").value == json::array({"exec-runner"}));
    CHECK(setting(no_env, "/parallelism").value.get<int>() >= 1);
}

TEST_CASE("bad values are reported with their source") {
    CHECK_THROWS_WITH_AS(resolve_config(json::object(), {}, fake_env({{"REFINE_SEARCH_JOBS", "four"}})),
                         doctest::Contains("REFINE_SEARCH_JOBS"), Error);
    CHECK_THROWS_WITH_AS(resolve_config(json::object(), {{"/seed", "1x"}}, fake_env({})),
                         doctest::Contains("expected an integer"), Error);
    CHECK_THROWS_AS(resolve_config(json::object(), {{"/sandbox/command", "  "}}, fake_env({})), Error);
}

TEST_CASE("command splitting") {
    CHECK(split_command("  python3 -m  runner ") == std::vector<std::string>{"python3", "-m", "runner"});
    CHECK(split_command("").empty());
}

TEST_CASE("command line binary") {
    SUBCASE("usage errors exit 2") {
        CHECK(run_cli("").status == 2);
        CHECK(run_cli("no-such-command").status == 2);
        CHECK(run_cli("--format xml vspace demo").status == 2);
    }
    SUBCASE("help exits 0") { CHECK(run_cli("--help").status == 0); }
    SUBCASE("vspace demo") {
        const auto r = run_cli("--format json vspace demo");
        REQUIRE(r.status == 0);
        const auto doc = json::parse(r.out);
        CHECK(doc["reproduced"] == true);
        CHECK(doc["steps"][1]["version_space"] == "∅");
        CHECK(doc["window_example"]["w_max"] == "3");
    }
    SUBCASE("vspace campaign") {
        const auto r = run_cli("--format json vspace campaign --models 10");
        REQUIRE(r.status == 0);
        const auto doc = json::parse(r.out);
        for (const auto& s : doc["sections"]) CHECK(s["violations"] == 0);
    }
    SUBCASE("doctor") {
        const auto ok = run_cli("--format json doctor --spec data/mock/mock.toml " + stub_runner_flag());
        CHECK(ok.status == 0);
        const auto doc = json::parse(ok.out);
        CHECK(doc["healthy"] == true);
        const auto bad = run_cli("doctor --spec data/mock/mock.toml --runner /nonexistent/runner");
        CHECK(bad.status == 1);
        CHECK(bad.out.find("FAIL runner") != std::string::npos);
    }
    SUBCASE("run, then analyze the traces") {
        rs_test::TempDir dir("cli_run");
        const auto out = dir.path().string();
        const auto r = run_cli(fmt::format("-q --format json run --spec data/mock/mock.toml --output '{}' {}", out,
                                           stub_runner_flag()));
        REQUIRE(r.status == 0);
        CHECK(fs::exists(dir.path() / "summary.json"));
        CHECK(fs::exists(dir.path() / "curve.sfs.csv"));
        const auto depth = run_cli(fmt::format("--format json analyze depth '{}'", out));
        REQUIRE(depth.status == 0);
        const auto doc = json::parse(depth.out);
        CHECK(doc["first_correct"].size() == 8);
        CHECK(doc["max"].size() == 8);
        const auto missing = run_cli(fmt::format("--error-json analyze diversity '{}'", out));
        CHECK(missing.status != 0);
    }
}
