#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtdsim/decider.hpp"
#include "dtdsim/prompt.hpp"

namespace dtdsim {

struct LlmClientConfig {
    std::string base_url = "https://api.openai.com";
    std::string model_name = "gpt-4o-mini";
    double temperature = 0.0;
    int max_retries = 3;
    double request_timeout_seconds = 60.0;
    int max_concurrent_requests = 4;
    std::string api_key_env = "OPENAI_API_KEY";

    void validate() const;  // throws ConfigError on out-of-range fields
};

/// Outcome of one HTTP round trip. `transport_ok` means the exchange
/// completed; the HTTP status may still be an error.
struct TransportResult {
    bool transport_ok = false;
    int status = 0;
    std::string body;
    std::string error;
};

/// The wire. `request_body` is the exact JSON payload for the
/// chat-completions call; implementations add transport concerns only, so
/// transcripts can log the payload verbatim without ever seeing credentials.
class ChatTransport {
  public:
    virtual ~ChatTransport() = default;
    virtual TransportResult send(const std::string& request_body) = 0;
};

/// POSTs to `<base_url>/v1/chat/completions` (or `<base_url>/chat/completions`
/// when the base already ends in /v1) with a bearer token.
class HttpChatTransport : public ChatTransport {
  public:
    HttpChatTransport(std::string base_url, std::string api_key, double timeout_seconds);
    TransportResult send(const std::string& request_body) override;

  private:
    std::string host_;  // scheme://host[:port]
    std::string path_;
    std::string api_key_;
    double timeout_seconds_;
};

struct LlmOutcome {
    bool ok = false;
    int choice = -1;  // 0-based route index when ok
    std::string reason;
    int attempts = 0;
    std::string failure;  // why the call degraded, when !ok
    nlohmann::json transcript = nlohmann::json::array();  // one entry per attempt
};

/// Drives the retry/re-ask loop around a transport: exponential backoff on
/// transport and HTTP errors, a corrective re-ask when the reply does not
/// parse or names a route out of range, and a cap on concurrent in-flight
/// requests. Shareable across threads.
class LlmClient {
  public:
    using SleepFn = std::function<void(std::chrono::milliseconds)>;

    /// `api_key` is read from config.api_key_env at construction when the
    /// default transport is used. Pass a custom `sleep` to make backoff
    /// observable in tests.
    LlmClient(LlmClientConfig config, std::unique_ptr<ChatTransport> transport,
              SleepFn sleep = {});

    /// Convenience constructor wiring the HTTP transport from the config.
    explicit LlmClient(LlmClientConfig config);

    LlmOutcome choose(const PromptBundle& prompt, int route_count);

    const LlmClientConfig& config() const { return config_; }

  private:
    void acquire_slot();
    void release_slot();

    LlmClientConfig config_;
    std::unique_ptr<ChatTransport> transport_;
    SleepFn sleep_;
    std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
};

/// Route choice by language model. Falls back to repeating yesterday's route
/// (uniform random before any history) when the call degrades, and marks the
/// decision so logs can report it.
class LlmDecider : public Decider {
  public:
    /// Called once per decision with the full call transcript; invoked from
    /// whatever thread ran the decision, so sinks must synchronize.
    using TranscriptSink = std::function<void(int agent_id, int day, const nlohmann::json&)>;

    LlmDecider(std::shared_ptr<LlmClient> client, std::string scenario_text,
               bool bonuses_enabled);

    Decision decide(const DeciderInput& input, Rng& rng) override;
    std::string name() const override { return "llm"; }

    void set_transcript_sink(TranscriptSink sink) { sink_ = std::move(sink); }

  private:
    std::shared_ptr<LlmClient> client_;
    std::string scenario_text_;
    bool bonuses_enabled_;
    TranscriptSink sink_;
};

}  // namespace dtdsim
