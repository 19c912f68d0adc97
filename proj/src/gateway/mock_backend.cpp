#include "refine_search/gateway/mock_backend.hpp"

#include <fmt/format.h>

#include <fstream>

namespace refine_search::gateway {

void MockScript::set(std::string key, std::string response) {
    responses_.insert_or_assign(std::move(key), std::move(response));
}

std::optional<std::string> MockScript::lookup(Role role, const CallContext& ctx) const {
    const auto find = [&](const std::string& key) -> std::optional<std::string> {
        if (const auto it = responses_.find(key); it != responses_.end()) return it->second;
        return std::nullopt;
    };
    const auto r = to_string(role);
    if (auto hit = find(fmt::format("{}/{}/{}", ctx.task_id, r, ctx.call_index))) return hit;
    if (ctx.code_index) {
        if (auto hit = find(fmt::format("{}/code/{}", ctx.task_id, *ctx.code_index))) return hit;
    }
    if (auto hit = find(fmt::format("{}/{}/*", ctx.task_id, r))) return hit;
    if (auto hit = find(fmt::format("*/{}/*", r))) return hit;
    return default_response_;
}

MockScript MockScript::from_json(const nlohmann::json& doc) {
    MockScript script;
    if (!doc.is_object() || !doc.contains("responses") || !doc["responses"].is_object()) {
        throw Error("mock script must be an object with a \"responses\" object");
    }
    for (const auto& [key, value] : doc["responses"].items()) script.set(key, value.get<std::string>());
    if (doc.contains("default_response") && !doc["default_response"].is_null()) {
        script.set_default(doc["default_response"].get<std::string>());
    }
    return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open mock script {}", path.string()));
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("malformed mock script {}: {}", path.string(), e.what()));
    }
}

nlohmann::json MockScript::to_json() const {
    nlohmann::json doc;
    doc["responses"] = nlohmann::json::object();
    for (const auto& [k, v] : responses_) doc["responses"][k] = v;
    if (default_response_) doc["default_response"] = *default_response_;
    return doc;
}

std::string MockBackend::complete(const GenerationRequest& request, const CallContext& context) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
    }
    auto hit = script_.lookup(request.role, context);
    if (!hit) {
        throw GatewayError(
            fmt::format("unscripted call: {}/{}/{}", context.task_id, to_string(request.role), context.call_index));
    }
    if (hit->empty()) throw GatewayError("mock script returned an empty response");
    return *hit;
}

std::string MockBackend::describe() const {
    return fmt::format("mock ({} scripted responses{})", script_.size(), script_.has_default() ? ", default" : "");
}

std::size_t MockBackend::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

}  // namespace refine_search::gateway
