#include "refine_search/gateway/http_backend.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace refine_search::gateway {

std::pair<std::string, std::string> split_base_url(std::string_view base_url) {
    const auto scheme = base_url.find("://");
    if (scheme == std::string_view::npos) throw Error(fmt::format("base URL '{}' lacks a scheme", base_url));
    const auto slash = base_url.find('/', scheme + 3);
    if (slash == std::string_view::npos) return {std::string(base_url), ""};
    std::string prefix(base_url.substr(slash));
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {std::string(base_url.substr(0, slash)), prefix};
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
    std::tie(origin_, prefix_) = split_base_url(options_.base_url);
}

std::string HttpBackend::complete(const GenerationRequest& request, const CallContext&) {
    nlohmann::json body;
    body["model"] = options_.model;
    body["temperature"] = request.params.temperature;
    body["max_tokens"] = request.params.max_tokens;
    if (request.params.seed) body["seed"] = *request.params.seed;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages) {
        body["messages"].push_back({{"role", m.speaker == Speaker::system ? "system" : "user"}, {"content", m.text}});
    }

    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout).count();
    client.set_connection_timeout(std::max<long>(1, secs), 0);
    client.set_read_timeout(std::max<long>(1, secs), 0);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    const auto res = client.Post(prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError(fmt::format("request to {} failed: {}", origin_, httplib::to_string(res.error())));
    if (res->status == 429 || res->status >= 500) {
        throw TransportError(fmt::format("backend returned HTTP {}", res->status));
    }
    if (res->status != 200) {
        throw GatewayError(fmt::format("backend returned HTTP {}: {}", res->status, res->body.substr(0, 200)));
    }
    std::string text;
    try {
        const auto doc = nlohmann::json::parse(res->body);
        text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(fmt::format("unexpected completion body: {}", e.what()));
    }
    if (text.empty()) throw GatewayError("backend returned an empty completion");
    return text;
}

std::string HttpBackend::describe() const {
    return fmt::format("http {}{} model={} key={}", origin_, prefix_, options_.model,
                       options_.api_key.empty() ? "unset" : "set");
}

void HttpBackend::ping() {
    GenerationRequest req;
    req.role = Role::gen_directions;
    req.messages = {{Speaker::system, "health check"}, {Speaker::user, "Reply with OK."}};
    req.params.temperature = 0.0;
    req.params.max_tokens = 1;
    complete(req, CallContext{"doctor", 1, std::nullopt});
}

}  // namespace refine_search::gateway
