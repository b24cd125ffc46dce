#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "dtdsim/llm_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "dtdsim/error.hpp"

namespace dtdsim {

using nlohmann::json;

void LlmClientConfig::validate() const {
    if (base_url.empty()) throw ConfigError("llm base_url must not be empty");
    if (model_name.empty()) throw ConfigError("llm model_name must not be empty");
    if (temperature < 0.0 || temperature > 2.0)
        throw ConfigError("llm temperature must lie in [0, 2]");
    if (max_retries < 1) throw ConfigError("llm max_retries must be at least 1");
    if (request_timeout_seconds <= 0.0) throw ConfigError("llm request timeout must be positive");
    if (max_concurrent_requests < 1)
        throw ConfigError("llm max_concurrent_requests must be at least 1");
}

HttpChatTransport::HttpChatTransport(std::string base_url, std::string api_key,
                                     double timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
    // Split "scheme://host[:port][/prefix]" into the client target and a path
    // prefix; accept bases with and without a trailing /v1.
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("llm base_url must start with http:// or https://");
    auto path_start = base_url.find('/', scheme_end + 3);
    std::string prefix;
    if (path_start == std::string::npos) {
        host_ = base_url;
    } else {
        host_ = base_url.substr(0, path_start);
        prefix = base_url.substr(path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }
    const std::string v1 = "/v1";
    const bool has_v1 =
        prefix.size() >= v1.size() && prefix.compare(prefix.size() - v1.size(), v1.size(), v1) == 0;
    path_ = prefix + (has_v1 ? "/chat/completions" : "/v1/chat/completions");
}

TransportResult HttpChatTransport::send(const std::string& request_body) {
    httplib::Client client(host_);
    const auto seconds = static_cast<time_t>(timeout_seconds_);
    const auto micros =
        static_cast<time_t>((timeout_seconds_ - static_cast<double>(seconds)) * 1e6);
    client.set_connect_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    TransportResult result;
    auto response = client.Post(path_, headers, request_body, "application/json");
    if (!response) {
        result.error = httplib::to_string(response.error());
        return result;
    }
    result.transport_ok = true;
    result.status = response->status;
    result.body = response->body;
    return result;
}

LlmClient::LlmClient(LlmClientConfig config, std::unique_ptr<ChatTransport> transport,
                     SleepFn sleep)
    : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
    config_.validate();
    if (transport_ == nullptr) throw ConfigError("llm client needs a transport");
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

namespace {
std::string key_from_env(const std::string& name) {
    const char* value = std::getenv(name.c_str());
    return value == nullptr ? std::string() : std::string(value);
}
}  // namespace

LlmClient::LlmClient(LlmClientConfig config)
    : LlmClient(config,
                std::make_unique<HttpChatTransport>(config.base_url,
                                                    key_from_env(config.api_key_env),
                                                    config.request_timeout_seconds)) {}

void LlmClient::acquire_slot() {
    std::unique_lock lock(mutex_);
    slot_free_.wait(lock, [this] { return in_flight_ < config_.max_concurrent_requests; });
    ++in_flight_;
}

void LlmClient::release_slot() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    slot_free_.notify_one();
}

LlmOutcome LlmClient::choose(const PromptBundle& prompt, int route_count) {
    LlmOutcome outcome;
    std::string corrective;  // appended to the user message after a bad reply

    for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
        outcome.attempts = attempt;
        std::string user_text = prompt.user_text;
        if (!corrective.empty()) user_text += "\n\n" + corrective;

        const json request = {
            {"model", config_.model_name},
            {"temperature", config_.temperature},
            {"messages",
             json::array({json{{"role", "system"}, {"content", prompt.system_text}},
                          json{{"role", "user"}, {"content", user_text}}})},
        };
        const std::string request_body = request.dump();

        acquire_slot();
        TransportResult wire = transport_->send(request_body);
        release_slot();

        json entry = {{"attempt", attempt}, {"request", request}};
        std::string problem;
        bool semantic_problem = false;

        if (!wire.transport_ok) {
            entry["transport_error"] = wire.error;
            problem = "transport error: " + wire.error;
        } else {
            entry["status"] = wire.status;
            entry["response"] = wire.body;
            if (wire.status != 200) {
                problem = "http status " + std::to_string(wire.status);
            } else {
                const auto envelope = json::parse(wire.body, nullptr, false);
                if (!envelope.is_object() || !envelope.contains("choices") ||
                    !envelope["choices"].is_array() || envelope["choices"].empty() ||
                    !envelope["choices"][0].contains("message") ||
                    !envelope["choices"][0]["message"].contains("content") ||
                    !envelope["choices"][0]["message"]["content"].is_string()) {
                    problem = "malformed chat-completion envelope";
                } else {
                    const std::string content =
                        envelope["choices"][0]["message"]["content"].get<std::string>();
                    try {
                        LlmReply reply = parse_reply(content, route_count);
                        outcome.ok = true;
                        outcome.choice = reply.choice;
                        outcome.reason = reply.reason;
                        entry["parsed_choice"] = reply.choice + 1;
                        outcome.transcript.push_back(std::move(entry));
                        return outcome;
                    } catch (const RangeError& e) {
                        problem = e.what();
                        semantic_problem = true;
                    } catch (const ParseError& e) {
                        problem = e.what();
                        semantic_problem = true;
                    }
                }
            }
        }

        entry["problem"] = problem;
        outcome.transcript.push_back(std::move(entry));
        outcome.failure = problem;

        if (semantic_problem) {
            corrective =
                "Your previous reply could not be used (" + problem +
                "). Answer again with only a JSON object of the form "
                R"({"reason": "...", "choice": "route N"})"
                " where N is between 1 and " +
                std::to_string(route_count) + ".";
        }
        if (attempt < config_.max_retries) {
            const auto backoff = std::chrono::milliseconds(
                std::min<std::int64_t>(500LL << (attempt - 1), 8000LL));
            sleep_(backoff);
        }
    }
    return outcome;
}

LlmDecider::LlmDecider(std::shared_ptr<LlmClient> client, std::string scenario_text,
                       bool bonuses_enabled)
    : client_(std::move(client)),
      scenario_text_(std::move(scenario_text)),
      bonuses_enabled_(bonuses_enabled) {
    if (client_ == nullptr) throw ConfigError("llm decider needs a client");
}

Decision LlmDecider::decide(const DeciderInput& input, Rng& rng) {
    if (input.agent == nullptr) throw SimError("decider input is missing the agent");
    const auto route_count = static_cast<int>(input.agent->memories.size());
    const PromptBundle prompt =
        build_prompt(*input.agent, route_count, scenario_text_, bonuses_enabled_);
    LlmOutcome outcome = client_->choose(prompt, route_count);
    if (sink_) sink_(input.agent->id, input.day, outcome.transcript);

    if (outcome.ok) return {outcome.choice, outcome.reason, false};

    // Degraded path: repeat yesterday's route; uniform random with no history.
    Decision decision;
    decision.fallback = true;
    decision.reason = "fallback after " + std::to_string(outcome.attempts) +
                      " attempts: " + outcome.failure;
    decision.route = input.agent->last_choice >= 0
                         ? input.agent->last_choice
                         : static_cast<int>(rng.bounded(static_cast<std::uint64_t>(route_count)));
    return decision;
}

}  // namespace dtdsim
