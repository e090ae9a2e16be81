#pragma once

#include "lplh/action_space.hpp"
#include "lplh/env.hpp"
#include "lplh/experience.hpp"
#include "lplh/gateway.hpp"
#include "lplh/kg.hpp"
#include "lplh/prompts.hpp"

#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace lplh {

struct TurnRecord {
    int step = 0;             // step within the episode (0 = reset)
    int global_step = 0;      // step across the whole run
    std::string action;       // empty for the reset record
    std::string reason;
    std::string observation;
    uint64_t observation_hash = 0;
    int score = 0;
    int score_delta = 0;
    bool terminal = false;
    TerminalKind terminal_kind = TerminalKind::none;

    nlohmann::json to_json() const;
};

struct CurvePoint {
    int global_step = 0;
    int max_score = 0;
    int learned_templates = 0;
    int learned_objects = 0;
    int visited_rooms = 0;
};

struct EpisodeLog {
    int epoch = 0;
    int episode = 0;
    std::vector<TurnRecord> turns;
    int final_score = 0;
    TerminalKind terminal_kind = TerminalKind::none;
    uint64_t transcript_hash = 0;

    int steps_taken() const; // env steps, excluding the reset record
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual void begin_episode() {}
    // Processes the outcome of the previous action (validation, learning,
    // summarization). Called for every outcome including reset and terminal.
    virtual void observe(const StepOutcome& outcome, int epoch, int global_step) = 0;
    // Produces the next command. Never called on a terminal outcome.
    virtual std::string decide() = 0;
    virtual std::string last_reason() const { return {}; }
    // Cumulative module-call counters (for the ablation bridge).
    virtual const std::map<std::string, int>& module_calls() const;
    virtual CurvePoint curve_point(int global_step, int max_score) const;
};

struct LplhOptions {
    bool no_kg = false;
    bool no_exp = false;
    bool no_as = false;
    bool use_rule_fm = true;          // rule-based validator/extractor/splitter
    bool use_gateway_summarizer = false;
    int history_len = 10;
    int retrieve_k = 3;
    size_t candidate_cap = 60;
    int summary_window_cap = 25;
    int stagnation_summary = 0;       // scoreless steps that force a summary; 0 = off
    int repeat_failure_limit = 2;     // same command failing twice in a room is dropped
};

// The per-turn pipeline: validate -> learn action -> extract/ingest ->
// summarize on scoring -> retrieve -> pair -> prompt -> parse command.
class LplhAgent final : public Agent {
public:
    LplhAgent(Gateway* gateway, LplhOptions options,
              std::shared_ptr<ExperienceStore> store);

    void begin_episode() override;
    void observe(const StepOutcome& outcome, int epoch, int global_step) override;
    std::string decide() override;
    std::string last_reason() const override { return last_reason_; }
    const std::map<std::string, int>& module_calls() const override { return calls_; }
    CurvePoint curve_point(int global_step, int max_score) const override;

    const KnowledgeGraph& kg() const { return kg_; }
    const ActionSpace& action_space() const { return as_; }
    const ExperienceStore& experiences() const { return *store_; }
    void reset_action_space() { as_ = ActionSpace{}; }

    KnowledgeGraph& mutable_kg() { return kg_; }

private:
    bool validate(const std::string& action, const std::string& observation);
    ActionSplit split_action(const std::string& action);
    std::vector<Triple> extract(const std::string& action, const std::string& observation);
    void summarize_event(const StepOutcome& outcome, int epoch, int global_step);
    std::string complete_with_retry(Role role, const std::string& prompt,
                                    int max_retries);
    void count(const std::string& op) { ++calls_[op]; }

    Gateway* gateway_;
    LplhOptions options_;
    KnowledgeGraph kg_;
    ActionSpace as_;
    std::shared_ptr<ExperienceStore> store_;

    std::string last_action_;
    std::string last_reason_;
    std::string last_observation_;
    std::string prev_observation_;
    int step_ = 0;
    int epoch_ = 0;
    int scoreless_streak_ = 0;
    std::deque<prompts::HistoryEntry> history_;
    std::vector<HistoryTurn> window_; // since the previous scoring event
    std::map<std::string, std::map<std::string, int>> failures_; // room -> cmd -> count
    std::map<std::string, int> calls_;
};

// History-only prompting, no modules (the plain comparison condition).
class BaselineAgent final : public Agent {
public:
    explicit BaselineAgent(Gateway* gateway, int history_len = 10);

    void begin_episode() override;
    void observe(const StepOutcome& outcome, int epoch, int global_step) override;
    std::string decide() override;
    const std::map<std::string, int>& module_calls() const override { return calls_; }

private:
    Gateway* gateway_;
    size_t history_len_;
    std::string last_action_;
    std::deque<prompts::HistoryEntry> history_;
    std::map<std::string, int> calls_;
};

// Replays a fixed command list, restarting it each episode.
class ScriptedAgent final : public Agent {
public:
    explicit ScriptedAgent(std::vector<std::string> commands);
    static ScriptedAgent from_file(const std::string& path);

    void begin_episode() override { next_ = 0; }
    void observe(const StepOutcome&, int, int) override {}
    std::string decide() override;
    const std::map<std::string, int>& module_calls() const override { return calls_; }

private:
    std::vector<std::string> commands_;
    size_t next_ = 0;
    std::map<std::string, int> calls_;
};

// Drives turns until terminal or the step cap; the cap is enforced here, not
// by the environment.
EpisodeLog run_episode(Agent& agent, Environment& env, int step_cap, uint64_t seed,
                       int epoch, int episode_index, int& global_step,
                       std::vector<CurvePoint>* curves = nullptr);

} // namespace lplh
