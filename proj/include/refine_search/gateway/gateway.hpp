#pragma once

#include "refine_search/core/types.hpp"
#include "refine_search/gateway/backend.hpp"
#include "refine_search/gateway/templates.hpp"

#include <atomic>
#include <map>
#include <memory>

namespace refine_search::gateway {

struct GatewayOptions {
    /// Retries per transport failure; a logical request makes at most
    /// `max_retries + 1` backend calls.
    int max_retries = 2;
    SamplingParams code_params{0.7, 2048, std::nullopt};
    SamplingParams direction_params{0.7, 1024, std::nullopt};
    SamplingParams aux_params{0.0, 1024, std::nullopt};
    /// Optional instruction suffixes appended round-robin to initial-code
    /// prompts (prompt-diversified initial generation).
    std::vector<std::string> init_prompt_suffixes;

    /// Deterministic defaults for scripted backends: every temperature is 0.
    static GatewayOptions for_mock();
};

class Session;

/// Shared, thread-safe entry point. Each strategy run opens its own Session,
/// which owns the per-(task, role) call counters the mock backend keys on.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, PromptTemplates templates = {}, GatewayOptions options = {});

    [[nodiscard]] Session session(std::string task_id) const;

    [[nodiscard]] const Backend& backend() const { return *backend_; }
    [[nodiscard]] const GatewayOptions& options() const { return options_; }
    [[nodiscard]] const PromptTemplates& templates() const { return templates_; }

    /// Backend invocations across all sessions, retries included.
    [[nodiscard]] std::uint64_t backend_calls() const { return backend_calls_->load(); }

private:
    friend class Session;
    std::shared_ptr<Backend> backend_;
    PromptTemplates templates_;
    GatewayOptions options_;
    std::shared_ptr<std::atomic<std::uint64_t>> backend_calls_;
};

/// Sequential view of the gateway for one task run.
class Session {
public:
    Session(const Gateway& gateway, std::string task_id);

    [[nodiscard]] const std::string& task_id() const { return task_id_; }

    /// Renders the role template, calls the backend with bounded retries and
    /// returns the raw text.
    std::string complete(Role role, const TemplateVars& vars);

    std::vector<std::string> generate_initial_codes(const Task& task, int n, const SharedInformation& info);

    /// Throws DirectionParseError ("no directions parsed") when the response yields nothing.
    std::vector<TextualDirection> generate_directions(const Task& task, std::string_view code,
                                                      std::string_view feedback, const SharedInformation& info,
                                                      int m);

    std::string refine_code(const Task& task, std::string_view code, std::string_view feedback,
                            const TextualDirection& direction);

    /// Returns `info` with one more entry; `info` itself is not modified. The
    /// outcome summary is model-written, or a fixed template if the call fails.
    SharedInformation update_shared_info(const Task& task, std::string_view code, const SharedInformation& info,
                                         const TextualDirection& direction, std::string_view refined_code,
                                         double score_before, double score_after,
                                         Role role = Role::update_shared_info);

    std::vector<TestCase> generate_validation_tests(const Task& task, int count);

    [[nodiscard]] int code_generations() const { return code_generations_; }
    [[nodiscard]] int calls(Role role) const;
    [[nodiscard]] int backend_attempts() const { return backend_attempts_; }

private:
    const Gateway* gateway_;
    std::string task_id_;
    std::map<Role, int> call_counts_;
    int code_generations_ = 0;
    int backend_attempts_ = 0;
};

/// Deterministic outcome summary used when the model call fails.
std::string template_outcome_summary(std::string_view direction, double before, double after);

}  // namespace refine_search::gateway
