#pragma once

#include "refine_search/gateway/backend.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <mutex>

namespace refine_search::gateway {

/// Scripted responses keyed `task_id/role/call_index`.
///
/// Besides exact keys the script accepts, in lookup order:
///   `task_id/code/N`   the N-th code generation of the session (init or refine),
///   `task_id/role/*`   any call of that role for the task,
///   `*/role/*`         any call of that role,
/// and finally `default_response`.
class MockScript {
public:
    MockScript() = default;

    void set(std::string key, std::string response);
    void set_default(std::string response) { default_response_ = std::move(response); }

    [[nodiscard]] std::optional<std::string> lookup(Role role, const CallContext& context) const;
    [[nodiscard]] bool has_default() const { return default_response_.has_value(); }
    [[nodiscard]] std::size_t size() const { return responses_.size(); }

    /// `{"responses": {key: text, ...}, "default_response": text?}`
    static MockScript from_json(const nlohmann::json& doc);
    static MockScript load(const std::filesystem::path& path);
    [[nodiscard]] nlohmann::json to_json() const;

private:
    std::map<std::string, std::string, std::less<>> responses_;
    std::optional<std::string> default_response_;
};

class MockBackend final : public Backend {
public:
    explicit MockBackend(MockScript script) : script_(std::move(script)) {}

    std::string complete(const GenerationRequest& request, const CallContext& context) override;
    [[nodiscard]] std::string describe() const override;
    [[nodiscard]] bool deterministic() const override { return true; }

    [[nodiscard]] std::size_t calls() const;

private:
    MockScript script_;
    mutable std::mutex mutex_;
    std::size_t calls_ = 0;
};

}  // namespace refine_search::gateway
