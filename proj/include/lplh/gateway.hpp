#pragma once

#include "lplh/parsers.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lplh {

enum class Role { actor, summarizer, validator, extractor, splitter };

std::string to_string(Role role);
Role role_from_string(const std::string& name);

struct RoleConfig {
    std::string model;
    double temperature = 0.6;
    int max_retries = 2;
    std::string template_id;
};

// Per-role defaults: actor/summarizer sample at 0.6, the three fm roles at 0.1.
RoleConfig default_role_config(Role role);

struct CallRecord {
    Role role = Role::actor;
    uint64_t fingerprint = 0;
    double latency_ms = 0.0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    bool ok = true;

    nlohmann::json to_json() const;
};

// Uniform interface to language models. Calls are logged (role, fingerprint,
// latency, usage) before the response is handed back.
class Gateway {
public:
    virtual ~Gateway() = default;

    std::string complete(Role role, const std::string& prompt);

    const std::vector<CallRecord>& call_log() const { return log_; }
    // When set, one JSON document per call is appended to this file.
    void set_log_sink(std::string path) { log_sink_ = std::move(path); }

    static uint64_t fingerprint(const std::string& prompt);

protected:
    virtual std::string do_complete(Role role, const std::string& prompt,
                                    CallRecord& record) = 0;

private:
    std::vector<CallRecord> log_;
    std::string log_sink_;
};

// Test oracle: canned responses keyed by (role, prompt fingerprint), substring
// match, or consumed from per-role queues. In strict mode an unmatched request
// throws ScriptMiss; otherwise it returns an empty response (which downstream
// parsing treats as a failure).
class ScriptedGateway final : public Gateway {
public:
    ScriptedGateway() = default;

    void add_fingerprint(Role role, uint64_t fp, std::string response);
    void add_contains(Role role, std::string needle, std::string response);
    void push_response(Role role, std::string response);
    void set_strict(bool strict) { strict_ = strict; }

    size_t queue_remaining(Role role) const;

    static ScriptedGateway from_json(const nlohmann::json& j);
    static ScriptedGateway from_file(const std::string& path);

protected:
    std::string do_complete(Role role, const std::string& prompt,
                            CallRecord& record) override;

private:
    std::map<std::pair<int, uint64_t>, std::string> by_fingerprint_;
    std::vector<std::tuple<int, std::string, std::string>> by_contains_;
    std::map<int, std::deque<std::string>> queues_;
    bool strict_ = true;
};

struct RemoteConfig {
    std::string base_url;           // e.g. http://localhost:8080/v1/chat/completions
    std::string api_key_env;        // environment variable holding the key
    std::map<Role, RoleConfig> roles;
    int timeout_s = 120;
    int attempts = 3;
    int backoff_ms = 500;           // doubled per retry
    long max_calls = 0;             // 0 = unlimited
    long max_tokens = 0;

    static RemoteConfig from_json(const nlohmann::json& j);
};

// OpenAI-compatible chat-completion client over HTTP.
class RemoteGateway final : public Gateway {
public:
    explicit RemoteGateway(RemoteConfig config);

protected:
    std::string do_complete(Role role, const std::string& prompt,
                            CallRecord& record) override;

private:
    RemoteConfig config_;
    std::string host_;
    int port_ = 80;
    std::string path_;
    long calls_ = 0;
    long tokens_ = 0;
};

// --- deterministic rule-based fm_* stand-ins ---

// Invalid iff the observation matches a rejection pattern or merely echoes
// the previous observation.
bool rule_validate(const std::string& prev_action, const std::string& observation,
                   const std::string& prev_observation = "");

// Relation extraction over the toy engine's regular prose.
std::vector<Triple> rule_extract(const std::string& prev_action,
                                 const std::string& observation);

// Verb/object decomposition with "&" placeholders.
ActionSplit rule_split(const std::string& action);

} // namespace lplh
