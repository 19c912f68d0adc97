#pragma once

#include "refine_search/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refine_search::gateway {

/// The six generation roles. Code-producing roles count toward the budget.
enum class Role { init_code, gen_tests, gen_directions, refine_code, update_shared_info, scout_insight };

inline constexpr Role kAllRoles[] = {Role::init_code,   Role::gen_tests,          Role::gen_directions,
                                     Role::refine_code, Role::update_shared_info, Role::scout_insight};

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

constexpr bool is_code_generation(Role role) { return role == Role::init_code || role == Role::refine_code; }

enum class Speaker { system, user };

struct Message {
    Speaker speaker = Speaker::user;
    std::string text;
};

struct SamplingParams {
    double temperature = 0.7;
    int max_tokens = 2048;
    std::optional<std::uint64_t> seed;
};

struct GenerationRequest {
    Role role = Role::init_code;
    std::vector<Message> messages;
    SamplingParams params;
};

/// Throws unless `messages` is non-empty, starts with a system message, and
/// the sampling parameters are in range.
void validate_request(const GenerationRequest& request);

/// Routing metadata for one call inside a session. Indices are 1-based.
struct CallContext {
    std::string task_id;
    int call_index = 1;              // per (task, role) within the session
    std::optional<int> code_index;   // per session, only for code-generation roles
};

/// Retryable failure: connection refused, timeout, 5xx, 429.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Non-retryable backend failure.
class GatewayError : public Error {
public:
    using Error::Error;
};

/// A direction response that yielded no list items. Keeps the raw text so
/// callers can fall back to using it whole.
class DirectionParseError : public GatewayError {
public:
    explicit DirectionParseError(std::string raw) : GatewayError("no directions parsed"), raw_(std::move(raw)) {}
    [[nodiscard]] const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

class Backend {
public:
    virtual ~Backend() = default;

    /// Returns raw model text, never empty on success.
    virtual std::string complete(const GenerationRequest& request, const CallContext& context) = 0;

    [[nodiscard]] virtual std::string describe() const = 0;

    /// True for scripted backends; used to pick deterministic sampling defaults.
    [[nodiscard]] virtual bool deterministic() const { return false; }
};

}  // namespace refine_search::gateway
