#include "lplh/agent.hpp"

#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <algorithm>
#include <fstream>

namespace lplh {

using text::fnv1a;
using text::lower;
using text::trim;

nlohmann::json TurnRecord::to_json() const {
    nlohmann::json j;
    j["step"] = step;
    j["global_step"] = global_step;
    j["action"] = action;
    j["reason"] = reason;
    j["observation"] = observation;
    j["observation_hash"] = observation_hash;
    j["score"] = score;
    j["score_delta"] = score_delta;
    j["terminal"] = terminal;
    j["terminal_kind"] = to_string(terminal_kind);
    return j;
}

int EpisodeLog::steps_taken() const {
    return turns.empty() ? 0 : static_cast<int>(turns.size()) - 1;
}

static std::map<std::string, int> g_empty_calls;

const std::map<std::string, int>& Agent::module_calls() const { return g_empty_calls; }

CurvePoint Agent::curve_point(int global_step, int max_score) const {
    CurvePoint p;
    p.global_step = global_step;
    p.max_score = max_score;
    return p;
}

// --- LplhAgent ---

LplhAgent::LplhAgent(Gateway* gateway, LplhOptions options,
                     std::shared_ptr<ExperienceStore> store)
    : gateway_(gateway), options_(options), store_(std::move(store)) {
    if (!store_)
        store_ = std::make_shared<ExperienceStore>(std::make_shared<HashingEmbedder>());
}

void LplhAgent::begin_episode() {
    kg_.reset_player();
    last_action_.clear();
    last_reason_.clear();
    last_observation_.clear();
    prev_observation_.clear();
    history_.clear();
    window_.clear();
    scoreless_streak_ = 0;
    step_ = 0;
}

std::string LplhAgent::complete_with_retry(Role role, const std::string& prompt,
                                           int max_retries) {
    std::string current = prompt;
    for (int attempt = 0;; ++attempt) {
        std::string response = gateway_->complete(role, current);
        if (!response.empty()) return response;
        if (attempt >= max_retries) return response;
        current = prompt + prompts::kCorrectiveSuffix;
    }
}

bool LplhAgent::validate(const std::string& action, const std::string& observation) {
    count("validator.calls");
    if (options_.use_rule_fm || gateway_ == nullptr)
        return rule_validate(action, observation, prev_observation_);
    std::string prompt = prompts::fill_validation(action, observation);
    std::string current = prompt;
    for (int attempt = 0; attempt <= 2; ++attempt) {
        std::string response = gateway_->complete(Role::validator, current);
        try {
            return parse_validation(response);
        } catch (const MalformedResponse&) {
            current = prompt + prompts::kCorrectiveSuffix;
        }
    }
    return rule_validate(action, observation, prev_observation_);
}

ActionSplit LplhAgent::split_action(const std::string& action) {
    count("splitter.calls");
    if (options_.use_rule_fm || gateway_ == nullptr) return rule_split(action);
    std::string prompt = prompts::fill_split(action);
    std::string current = prompt;
    for (int attempt = 0; attempt <= 2; ++attempt) {
        std::string response = gateway_->complete(Role::splitter, current);
        try {
            ActionSplit split = parse_action_split(response);
            // Only accept splits that reproduce the command they came from.
            if (lower(trim(split.render())) == lower(trim(action))) return split;
        } catch (const MalformedResponse&) {
        }
        current = prompt + prompts::kCorrectiveSuffix;
    }
    return rule_split(action);
}

std::vector<Triple> LplhAgent::extract(const std::string& action,
                                       const std::string& observation) {
    count("extractor.calls");
    if (options_.use_rule_fm || gateway_ == nullptr)
        return rule_extract(action, observation);
    std::string prompt = prompts::fill_extraction(action, observation);
    std::string current = prompt;
    for (int attempt = 0; attempt <= 2; ++attempt) {
        std::string response = gateway_->complete(Role::extractor, current);
        try {
            return parse_triples(response);
        } catch (const MalformedResponse&) {
            current = prompt + prompts::kCorrectiveSuffix;
        }
    }
    return rule_extract(action, observation);
}

void LplhAgent::summarize_event(const StepOutcome& outcome, int epoch, int global_step) {
    count("exp.summarize");
    ExperienceRecord rec;
    bool built = false;
    if (options_.use_gateway_summarizer && gateway_ != nullptr) {
        std::vector<prompts::HistoryEntry> entries;
        for (const auto& t : window_) entries.push_back({t.action, t.observation, ""});
        std::string prompt =
            prompts::fill_summary(entries, outcome.score, outcome.score_delta);
        std::string current = prompt;
        for (int attempt = 0; attempt <= 2 && !built; ++attempt) {
            try {
                std::string response = gateway_->complete(Role::summarizer, current);
                ExperienceFields fields = parse_experience(response);
                rec = record_from_fields(fields, outcome.score_delta,
                                         outcome.terminal_kind, kg_.player_location(),
                                         epoch, global_step);
                built = true;
            } catch (const MalformedResponse&) {
                current = prompt + prompts::kCorrectiveSuffix;
            } catch (const ModelUnavailable&) {
                break;
            }
        }
    }
    if (!built)
        rec = fallback_record(window_, outcome.score_delta, outcome.terminal_kind,
                              kg_.player_location(), epoch, global_step);
    store_->store(std::move(rec));
    count("exp.store");
    window_.clear();
}

void LplhAgent::observe(const StepOutcome& outcome, int epoch, int global_step) {
    epoch_ = epoch;
    const std::string& obs = outcome.observation;

    if (!last_action_.empty()) {
        bool valid = validate(last_action_, obs);
        if (!valid && !kg_.player_location().empty())
            ++failures_[kg_.player_location()][lower(trim(last_action_))];

        ActionSplit split;
        if (!options_.no_as || !options_.no_kg) split = split_action(last_action_);
        if (valid && !options_.no_as) {
            as_.record_valid(split, global_step);
            count("as.record_valid");
        }
        if (!options_.no_kg) {
            kg_.apply_action(split, valid, global_step);
            count("kg.apply_action");
        }
        history_.push_back({last_action_, obs, last_reason_});
        while (static_cast<int>(history_.size()) > options_.history_len)
            history_.pop_front();
        window_.push_back({last_action_, obs, valid});
        while (static_cast<int>(window_.size()) > options_.summary_window_cap)
            window_.erase(window_.begin());
    } else {
        window_.push_back({"look", obs, true});
    }

    if (!options_.no_kg) {
        std::vector<Triple> triples = extract(last_action_, obs);
        kg_.ingest_triples(triples, global_step);
        count("kg.ingest");
    }

    if (outcome.score_delta != 0)
        scoreless_streak_ = 0;
    else
        ++scoreless_streak_;

    if (!options_.no_exp) {
        bool stagnant = options_.stagnation_summary > 0 &&
                        scoreless_streak_ >= options_.stagnation_summary &&
                        !window_.empty();
        if (should_summarize(outcome.score_delta, outcome.terminal_kind) || stagnant) {
            summarize_event(outcome, epoch, global_step);
            if (stagnant) scoreless_streak_ = 0;
        }
    }

    prev_observation_ = last_observation_;
    last_observation_ = obs;
    ++step_;
}

std::string LplhAgent::decide() {
    std::vector<std::string> experiences;
    if (!options_.no_exp && store_->size() > 0) {
        std::string query = build_query(kg_.player_location(), last_observation_);
        auto hits = store_->retrieve(query, static_cast<size_t>(options_.retrieve_k));
        count("exp.retrieve");
        for (const auto& [rec, sim] : hits) {
            std::string line = rec.lesson;
            if (!rec.location.empty()) line += " (at " + rec.location + ")";
            experiences.push_back(line);
        }
    }

    std::vector<std::string> candidates;
    if (!options_.no_as) {
        std::vector<std::string> visible;
        std::vector<std::string> inv;
        if (!options_.no_kg) {
            visible = kg_.visible_objects();
            inv.assign(kg_.inventory().begin(), kg_.inventory().end());
        }
        candidates = as_.pair(visible, inv, options_.candidate_cap);
        count("as.pair");
        // Drop commands that have repeatedly failed in this room.
        auto room_it = failures_.find(kg_.player_location());
        if (room_it != failures_.end()) {
            const auto& failed = room_it->second;
            candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                            [&](const std::string& c) {
                                                auto it = failed.find(lower(trim(c)));
                                                return it != failed.end() &&
                                                       it->second >=
                                                           options_.repeat_failure_limit;
                                            }),
                             candidates.end());
        }
    }

    std::string kg_context;
    if (!options_.no_kg) {
        kg_context = kg_.serialize_context();
        count("kg.serialize");
    }

    std::vector<prompts::HistoryEntry> history(history_.begin(), history_.end());
    std::string prompt = prompts::fill_lplh(kg_context, candidates, experiences,
                                            history, last_observation_);
    std::string current = prompt;
    ParsedCommand cmd{"look", "fallback after unparseable responses"};
    if (gateway_ != nullptr) {
        for (int attempt = 0; attempt <= 2; ++attempt) {
            try {
                std::string response = gateway_->complete(Role::actor, current);
                cmd = parse_agent_command(response);
                break;
            } catch (const MalformedResponse&) {
                current = prompt + prompts::kCorrectiveSuffix;
            }
        }
    }
    last_action_ = cmd.command;
    last_reason_ = cmd.reason;
    return cmd.command;
}

CurvePoint LplhAgent::curve_point(int global_step, int max_score) const {
    CurvePoint p;
    p.global_step = global_step;
    p.max_score = max_score;
    auto [templates, objects] = as_.counts();
    p.learned_templates = templates;
    p.learned_objects = objects;
    p.visited_rooms = kg_.stats().first;
    return p;
}

// --- BaselineAgent ---

BaselineAgent::BaselineAgent(Gateway* gateway, int history_len)
    : gateway_(gateway), history_len_(static_cast<size_t>(history_len)) {}

void BaselineAgent::begin_episode() {
    last_action_.clear();
    history_.clear();
}

void BaselineAgent::observe(const StepOutcome& outcome, int, int) {
    if (!last_action_.empty()) {
        history_.push_back({last_action_, outcome.observation, ""});
        while (history_.size() > history_len_) history_.pop_front();
    } else {
        history_.push_back({"look", outcome.observation, ""});
    }
}

std::string BaselineAgent::decide() {
    std::vector<prompts::HistoryEntry> history(history_.begin(), history_.end());
    std::string observation = history.empty() ? std::string{} : history.back().observation;
    std::string prompt = prompts::fill_baseline(history, observation);
    std::string current = prompt;
    std::string cmd = "look";
    if (gateway_ != nullptr) {
        for (int attempt = 0; attempt <= 2; ++attempt) {
            try {
                std::string response = gateway_->complete(Role::actor, current);
                cmd = parse_baseline_command(response);
                break;
            } catch (const MalformedResponse&) {
                current = prompt + prompts::kCorrectiveSuffix;
            }
        }
    }
    ++calls_["actor.decide"];
    last_action_ = cmd;
    return cmd;
}

// --- ScriptedAgent ---

ScriptedAgent::ScriptedAgent(std::vector<std::string> commands)
    : commands_(std::move(commands)) {}

ScriptedAgent ScriptedAgent::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open script: " + path);
    std::vector<std::string> commands;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        commands.push_back(line);
    }
    return ScriptedAgent(std::move(commands));
}

std::string ScriptedAgent::decide() {
    ++calls_["scripted.decide"];
    if (next_ >= commands_.size()) return "look";
    return commands_[next_++];
}

// --- episode driver ---

EpisodeLog run_episode(Agent& agent, Environment& env, int step_cap, uint64_t seed,
                       int epoch, int episode_index, int& global_step,
                       std::vector<CurvePoint>* curves) {
    EpisodeLog log;
    log.epoch = epoch;
    log.episode = episode_index;

    agent.begin_episode();
    StepOutcome out = env.reset(seed);
    int max_score = out.score;
    uint64_t transcript = 14695981039346656037ull;
    auto record = [&](const std::string& action, const std::string& reason, int step) {
        TurnRecord t;
        t.step = step;
        t.global_step = global_step;
        t.action = action;
        t.reason = reason;
        t.observation = out.observation;
        t.observation_hash = fnv1a(out.observation);
        t.score = out.score;
        t.score_delta = out.score_delta;
        t.terminal = out.terminal;
        t.terminal_kind = out.terminal_kind;
        log.turns.push_back(std::move(t));
        transcript = fnv1a(action + "\x1f" + out.observation + "\x1f" +
                               std::to_string(out.score),
                           transcript);
    };

    record("", "", 0);
    int step = 0;
    while (!out.terminal && step < step_cap) {
        agent.observe(out, epoch, global_step);
        if (curves) curves->push_back(agent.curve_point(global_step, max_score));
        std::string cmd = agent.decide();
        out = env.step(cmd);
        ++step;
        ++global_step;
        max_score = std::max(max_score, out.score);
        record(cmd, agent.last_reason(), step);
    }
    agent.observe(out, epoch, global_step);
    if (curves) curves->push_back(agent.curve_point(global_step, max_score));

    log.final_score = out.score;
    log.terminal_kind =
        out.terminal ? out.terminal_kind : TerminalKind::step_limit;
    log.transcript_hash = transcript;
    return log;
}

} // namespace lplh
