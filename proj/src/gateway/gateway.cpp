#include "refine_search/gateway/gateway.hpp"

#include "refine_search/gateway/parsing.hpp"

#include <fmt/format.h>

namespace refine_search::gateway {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::init_code: return "init_code";
        case Role::gen_tests: return "gen_tests";
        case Role::gen_directions: return "gen_directions";
        case Role::refine_code: return "refine_code";
        case Role::update_shared_info: return "update_shared_info";
        case Role::scout_insight: return "scout_insight";
    }
    return "init_code";
}

Role role_from_string(std::string_view text) {
    for (const auto role : kAllRoles) {
        if (to_string(role) == text) return role;
    }
    throw Error(fmt::format("unknown role '{}'", text));
}

void validate_request(const GenerationRequest& request) {
    if (request.messages.empty()) throw Error("generation request has no messages");
    if (request.messages.front().speaker != Speaker::system) throw Error("first message must be the system message");
    if (request.params.temperature < 0.0) throw Error("temperature must be >= 0");
    if (request.params.max_tokens <= 0) throw Error("max_tokens must be > 0");
}

GatewayOptions GatewayOptions::for_mock() {
    GatewayOptions o;
    o.code_params.temperature = 0.0;
    o.direction_params.temperature = 0.0;
    o.aux_params.temperature = 0.0;
    return o;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, PromptTemplates templates, GatewayOptions options)
    : backend_(std::move(backend)),
      templates_(std::move(templates)),
      options_(std::move(options)),
      backend_calls_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    if (!backend_) throw Error("gateway needs a backend");
    if (options_.max_retries < 0) throw Error("max_retries must be >= 0");
}

Session Gateway::session(std::string task_id) const { return Session(*this, std::move(task_id)); }

Session::Session(const Gateway& gateway, std::string task_id) : gateway_(&gateway), task_id_(std::move(task_id)) {}

int Session::calls(Role role) const {
    const auto it = call_counts_.find(role);
    return it == call_counts_.end() ? 0 : it->second;
}

std::string Session::complete(Role role, const TemplateVars& vars) {
    const auto& opts = gateway_->options_;
    GenerationRequest request;
    request.role = role;
    request.messages = gateway_->templates_.render(role, vars);
    switch (role) {
        case Role::init_code:
        case Role::refine_code: request.params = opts.code_params; break;
        case Role::gen_directions: request.params = opts.direction_params; break;
        default: request.params = opts.aux_params; break;
    }
    validate_request(request);

    CallContext ctx;
    ctx.task_id = task_id_;
    ctx.call_index = ++call_counts_[role];
    if (is_code_generation(role)) ctx.code_index = ++code_generations_;

    for (int attempt = 0;; ++attempt) {
        ++backend_attempts_;
        gateway_->backend_calls_->fetch_add(1);
        try {
            auto text = gateway_->backend_->complete(request, ctx);
            if (text.empty()) throw GatewayError("backend returned an empty response");
            return text;
        } catch (const TransportError& e) {
            if (attempt >= opts.max_retries) {
                throw GatewayError(fmt::format("{} failed after {} attempts: {}", to_string(role), attempt + 1,
                                               e.what()));
            }
        }
    }
}

namespace {

std::string score_text(double s) { return fmt::format("{:.2f}", s); }

std::string or_none(std::string_view text) { return text.empty() ? std::string("(none)") : std::string(text); }

}  // namespace

std::vector<std::string> Session::generate_initial_codes(const Task& task, int n, const SharedInformation& info) {
    if (n < 1) throw Error("generate_initial_codes needs n >= 1");
    const auto& suffixes = gateway_->options_.init_prompt_suffixes;
    std::vector<std::string> codes;
    codes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        TemplateVars vars{{"prompt", task.prompt}, {"shared_info", or_none(info.rendered())}, {"suffix", ""}};
        // Rotation follows the session's init_code count so one-at-a-time callers still cycle.
        if (!suffixes.empty()) {
            vars["suffix"] = "\n" + suffixes[static_cast<std::size_t>(calls(Role::init_code)) % suffixes.size()];
        }
        auto code = extract_code(complete(Role::init_code, vars));
        if (code.empty()) throw GatewayError("initial code response contained no code");
        codes.push_back(std::move(code));
    }
    return codes;
}

std::vector<TextualDirection> Session::generate_directions(const Task& task, std::string_view code,
                                                           std::string_view feedback, const SharedInformation& info,
                                                           int m) {
    if (m < 1) throw Error("generate_directions needs m >= 1");
    const TemplateVars vars{{"prompt", task.prompt},
                            {"code", std::string(code)},
                            {"feedback", or_none(feedback)},
                            {"shared_info", or_none(info.rendered())},
                            {"m", std::to_string(m)}};
    auto raw = complete(Role::gen_directions, vars);
    const auto items = parse_direction_list(raw, m);
    if (items.empty()) throw DirectionParseError(std::move(raw));
    std::vector<TextualDirection> out;
    for (const auto& text : items) out.push_back({text, std::nullopt, false});
    return out;
}

std::string Session::refine_code(const Task& task, std::string_view code, std::string_view feedback,
                                 const TextualDirection& direction) {
    if (direction.text.empty()) throw Error("refine_code needs a non-empty direction");
    const TemplateVars vars{{"prompt", task.prompt},
                            {"code", std::string(code)},
                            {"feedback", or_none(feedback)},
                            {"direction", direction.text}};
    auto refined = extract_code(complete(Role::refine_code, vars));
    if (refined.empty()) throw GatewayError("refinement response contained no code");
    return refined;
}

std::string template_outcome_summary(std::string_view direction, double before, double after) {
    const char* verdict = after > before ? "improved" : (after < before ? "worsened" : "did not change");
    return fmt::format("Direction \"{}\" {} the validation score ({} -> {}).", direction, verdict, score_text(before),
                       score_text(after));
}

SharedInformation Session::update_shared_info(const Task& task, std::string_view code, const SharedInformation& info,
                                              const TextualDirection& direction, std::string_view refined_code,
                                              double score_before, double score_after, Role role) {
    const auto in_unit = [](double s) { return s >= 0.0 && s <= 1.0; };
    if (!in_unit(score_before) || !in_unit(score_after)) throw Error("scores must lie in [0,1]");
    std::string summary;
    try {
        const TemplateVars vars{{"prompt", task.prompt},
                                {"code", std::string(code)},
                                {"direction", direction.text},
                                {"refined_code", std::string(refined_code)},
                                {"score_before", score_text(score_before)},
                                {"score_after", score_text(score_after)},
                                {"shared_info", or_none(info.rendered())}};
        summary = trim(complete(role, vars));
    } catch (const Error&) {
        summary.clear();
    }
    if (summary.empty()) summary = template_outcome_summary(direction.text, score_before, score_after);
    return info.appended({direction.text, std::move(summary), score_after - score_before});
}

std::vector<TestCase> Session::generate_validation_tests(const Task& task, int count) {
    if (count < 1) throw Error("generate_validation_tests needs count >= 1");
    const TemplateVars vars{{"prompt", task.prompt}, {"count", std::to_string(count)}};
    auto tests = parse_validation_tests(complete(Role::gen_tests, vars), count);
    if (tests.empty()) throw GatewayError("no tests generated");
    return tests;
}

}  // namespace refine_search::gateway
