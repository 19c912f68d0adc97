#pragma once

#include "refine_search/gateway/backend.hpp"

#include <chrono>

namespace refine_search::gateway {

inline constexpr const char* kApiKeyEnv = "REFINE_SEARCH_API_KEY";

struct HttpBackendOptions {
    std::string base_url;  // e.g. http://127.0.0.1:8000/v1
    std::string model;
    std::string api_key;   // empty: no Authorization header
    std::chrono::milliseconds timeout{60000};
};

/// Splits `http://host:port/prefix` into the origin and the path prefix.
std::pair<std::string, std::string> split_base_url(std::string_view base_url);

/// OpenAI-compatible `POST {base_url}/chat/completions` client.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendOptions options);

    std::string complete(const GenerationRequest& request, const CallContext& context) override;
    [[nodiscard]] std::string describe() const override;

    /// Sends a one-token request; throws on any failure.
    void ping();

private:
    HttpBackendOptions options_;
    std::string origin_;
    std::string prefix_;
};

}  // namespace refine_search::gateway
