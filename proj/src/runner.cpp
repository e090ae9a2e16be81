#include "lplh/runner.hpp"

#include "lplh/adapter_env.hpp"
#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lplh {

namespace fs = std::filesystem;
using text::fnv1a;

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("env")) c.env = j.at("env").get<std::string>();
    if (j.contains("fixture")) c.fixture_path = j.at("fixture").get<std::string>();
    if (j.contains("agent")) c.agent = j.at("agent").get<std::string>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("steps")) c.steps = j.at("steps").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("no_kg")) c.no_kg = j.at("no_kg").get<bool>();
    if (j.contains("no_exp")) c.no_exp = j.at("no_exp").get<bool>();
    if (j.contains("no_as")) c.no_as = j.at("no_as").get<bool>();
    if (j.contains("fresh_as")) c.fresh_as = j.at("fresh_as").get<bool>();
    if (j.contains("stagnation_summary"))
        c.stagnation_summary = j.at("stagnation_summary").get<int>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("gateway")) c.gateway = j.at("gateway");
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["agent"] = agent;
    j["epochs"] = epochs;
    j["steps_per_epoch"] = steps_per_epoch;
    j["epoch_finals"] = epoch_finals;
    j["raw"] = raw;
    j["max"] = max_final;
    j["sigma"] = sigma;
    j["total_steps"] = total_steps;
    j["transcript_hash"] = transcript_hash;
    j["module_calls"] = module_calls;
    return j;
}

double mean_all(const std::vector<int>& finals) {
    if (finals.empty()) return 0.0;
    double sum = 0.0;
    for (int f : finals) sum += f;
    return sum / static_cast<double>(finals.size());
}

double mean_last3(const std::vector<int>& finals) {
    if (finals.empty()) return 0.0;
    size_t n = std::min<size_t>(3, finals.size());
    double sum = 0.0;
    for (size_t i = finals.size() - n; i < finals.size(); ++i) sum += finals[i];
    return sum / static_cast<double>(n);
}

int max_final(const std::vector<int>& finals) {
    return finals.empty() ? 0 : *std::max_element(finals.begin(), finals.end());
}

double sigma_population(const std::vector<int>& finals) {
    if (finals.empty()) return 0.0;
    double mu = mean_all(finals);
    double acc = 0.0;
    for (int f : finals) acc += (f - mu) * (f - mu);
    return std::sqrt(acc / static_cast<double>(finals.size()));
}

double raw_score(const std::string& agent, const std::vector<int>& finals) {
    return agent == "lplh" ? mean_last3(finals) : mean_all(finals);
}

std::string emit_curves(const std::vector<CurvePoint>& points, int total_steps) {
    std::ostringstream out;
    out << "scaled_step,max_score,learned_actions,visited_rooms\n";
    double denom = total_steps > 0 ? static_cast<double>(total_steps) : 1.0;
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const auto& p : points) {
        out << (p.global_step / denom) << ',' << p.max_score << ','
            << (p.learned_templates + p.learned_objects) << ',' << p.visited_rooms
            << '\n';
    }
    return out.str();
}

std::unique_ptr<Environment> make_env(const RunConfig& config) {
    if (config.env == "toy") {
        WorldFixture fixture;
        if (config.fixture_path.empty()) {
            fixture = miniature_manor();
        } else {
            std::ifstream in(config.fixture_path);
            if (!in) throw Error("cannot open fixture: " + config.fixture_path);
            nlohmann::json j;
            in >> j;
            fixture = WorldFixture::from_json(j);
        }
        return std::make_unique<ToyEngine>(std::move(fixture));
    }
    if (config.env.rfind("adapter:", 0) == 0)
        return std::make_unique<AdapterEnv>(config.env.substr(8));
    throw Error("unknown env: " + config.env);
}

std::unique_ptr<Gateway> make_gateway(const nlohmann::json& spec) {
    if (spec.is_null() || !spec.contains("type")) return nullptr;
    std::string type = spec.at("type").get<std::string>();
    if (type == "none") return nullptr;
    if (type == "scripted") {
        if (spec.contains("file"))
            return std::make_unique<ScriptedGateway>(
                ScriptedGateway::from_file(spec.at("file").get<std::string>()));
        return std::make_unique<ScriptedGateway>(ScriptedGateway::from_json(spec));
    }
    if (type == "remote")
        return std::make_unique<RemoteGateway>(RemoteConfig::from_json(spec));
    throw Error("unknown gateway type: " + type);
}

namespace {

struct AgentBundle {
    std::unique_ptr<Agent> agent;
    LplhAgent* lplh = nullptr; // non-owning view when agent == "lplh"
};

AgentBundle make_agent(const RunConfig& config, Gateway* gateway) {
    AgentBundle b;
    if (config.agent == "lplh") {
        LplhOptions opt;
        opt.no_kg = config.no_kg;
        opt.no_exp = config.no_exp;
        opt.no_as = config.no_as;
        opt.stagnation_summary = config.stagnation_summary;
        auto agent = std::make_unique<LplhAgent>(gateway, opt, nullptr);
        b.lplh = agent.get();
        b.agent = std::move(agent);
    } else if (config.agent == "baseline") {
        b.agent = std::make_unique<BaselineAgent>(gateway);
    } else if (config.agent.rfind("scripted:", 0) == 0) {
        b.agent = std::make_unique<ScriptedAgent>(
            ScriptedAgent::from_file(config.agent.substr(9)));
    } else {
        throw Error("unknown agent: " + config.agent);
    }
    return b;
}

std::string agent_kind(const std::string& agent) {
    return agent.rfind("scripted:", 0) == 0 ? "scripted" : agent;
}

} // namespace

RunReport run(const RunConfig& config) {
    auto env = make_env(config);
    auto gateway = make_gateway(config.gateway);

    std::ofstream episodes;
    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        episodes.open(config.out_dir + "/episodes.jsonl");
        if (gateway) gateway->set_log_sink(config.out_dir + "/calls.jsonl");
    }

    AgentBundle bundle = make_agent(config, gateway.get());
    Agent& agent = *bundle.agent;

    nlohmann::json header;
    header["type"] = "header";
    header["agent"] = agent_kind(config.agent);
    header["env"] = config.env == "toy" ? "toy" : "adapter";
    header["seed"] = config.seed;
    header["epochs"] = config.epochs;
    header["steps"] = config.steps;
    if (config.env == "toy") {
        auto* toy = dynamic_cast<ToyEngine*>(env.get());
        header["fixture"] = toy->fixture().to_json();
    }
    if (episodes.is_open()) episodes << header.dump() << '\n';

    std::vector<int> finals;
    std::vector<CurvePoint> curves;
    int global_step = 0;
    uint64_t run_hash = 14695981039346656037ull;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.fresh_as && bundle.lplh) bundle.lplh->reset_action_space();
        int used = 0;
        int episode = 0;
        int epoch_final = 0;
        // An epoch owns a fixed step budget; death restarts the episode within
        // the same epoch, victory ends the epoch early.
        while (used < config.steps) {
            EpisodeLog log = run_episode(agent, *env, config.steps - used, config.seed,
                                         epoch, episode, global_step, &curves);
            used += log.steps_taken();
            epoch_final = log.final_score;
            run_hash = fnv1a(std::to_string(log.transcript_hash), run_hash);
            if (episodes.is_open()) {
                for (const auto& t : log.turns) {
                    nlohmann::json j = t.to_json();
                    j["type"] = "turn";
                    j["epoch"] = epoch;
                    j["episode"] = episode;
                    episodes << j.dump() << '\n';
                }
                nlohmann::json end;
                end["type"] = "episode_end";
                end["epoch"] = epoch;
                end["episode"] = episode;
                end["final_score"] = log.final_score;
                end["terminal"] = to_string(log.terminal_kind);
                end["steps"] = log.steps_taken();
                end["transcript_hash"] = log.transcript_hash;
                episodes << end.dump() << '\n';
            }
            ++episode;
            if (log.terminal_kind == TerminalKind::victory) break;
            if (log.terminal_kind == TerminalKind::step_limit) break;
            if (log.steps_taken() == 0) break;
        }
        finals.push_back(epoch_final);
    }

    // The curve tracks the best score achieved so far across the whole run.
    int best = 0;
    for (auto& p : curves) {
        best = std::max(best, p.max_score);
        p.max_score = best;
    }

    RunReport report;
    report.agent = agent_kind(config.agent);
    report.epochs = config.epochs;
    report.steps_per_epoch = config.steps;
    report.epoch_finals = finals;
    report.raw = raw_score(report.agent, finals);
    report.max_final = max_final(finals);
    report.sigma = sigma_population(finals);
    report.total_steps = global_step;
    report.transcript_hash = run_hash;
    report.module_calls = agent.module_calls();

    if (!config.out_dir.empty()) {
        std::ofstream(config.out_dir + "/report.json") << report.to_json().dump(2)
                                                       << '\n';
        std::ofstream(config.out_dir + "/curves.csv")
            << emit_curves(curves, global_step);
        if (bundle.lplh) {
            std::ofstream(config.out_dir + "/kg_snapshot.json")
                << bundle.lplh->kg().export_snapshot().dump(2) << '\n';
            std::ofstream(config.out_dir + "/as_snapshot.json")
                << bundle.lplh->action_space().export_snapshot().dump(2) << '\n';
            bundle.lplh->experiences().save(config.out_dir + "/experience.jsonl",
                                            config.out_dir + "/experience.vec");
        }
    }
    return report;
}

namespace {

std::string resolve_log_path(const std::string& path) {
    if (fs::is_directory(path)) return path + "/episodes.jsonl";
    return path;
}

} // namespace

ReplayResult replay(const std::string& log_path) {
    std::ifstream in(resolve_log_path(log_path));
    if (!in) throw Error("cannot open episode log: " + log_path);

    std::string line;
    if (!std::getline(in, line)) throw Error("empty episode log");
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.value("env", "") != "toy")
        throw Unsupported("only toy-engine runs can be replayed");

    WorldFixture fixture = WorldFixture::from_json(header.at("fixture"));
    ToyEngine env(fixture);
    uint64_t seed = header.value("seed", 0ull);

    ReplayResult result;
    StepOutcome out;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string type = j.value("type", "");
        if (type != "turn") continue;
        int step = j.at("step").get<int>();
        if (step == 0) {
            out = env.reset(seed);
        } else {
            out = env.step(j.at("action").get<std::string>());
        }
        bool score_ok = out.score == j.at("score").get<int>();
        bool obs_ok = fnv1a(out.observation) == j.at("observation_hash").get<uint64_t>();
        if (!score_ok || !obs_ok) {
            result.ok = false;
            result.epoch = j.value("epoch", 0);
            result.episode = j.value("episode", 0);
            result.step = step;
            result.message = score_ok ? "observation mismatch" : "score mismatch";
            return result;
        }
    }
    return result;
}

RunReport report_from_logs(const std::string& run_dir) {
    std::ifstream in(resolve_log_path(run_dir));
    if (!in) throw Error("cannot open episode log: " + run_dir);

    RunReport report;
    std::map<int, int> epoch_final; // epoch -> final of its last episode
    std::map<int, int> epoch_steps;
    uint64_t run_hash = 14695981039346656037ull;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string type = j.value("type", "");
        if (type == "header") {
            report.agent = j.value("agent", "");
            report.epochs = j.value("epochs", 0);
            report.steps_per_epoch = j.value("steps", 0);
        } else if (type == "episode_end") {
            int epoch = j.at("epoch").get<int>();
            epoch_final[epoch] = j.at("final_score").get<int>();
            epoch_steps[epoch] += j.at("steps").get<int>();
            run_hash = fnv1a(std::to_string(j.at("transcript_hash").get<uint64_t>()),
                             run_hash);
        }
    }
    for (const auto& [epoch, final_score] : epoch_final)
        report.epoch_finals.push_back(final_score);
    for (const auto& [epoch, steps] : epoch_steps) report.total_steps += steps;
    report.raw = raw_score(report.agent, report.epoch_finals);
    report.max_final = max_final(report.epoch_finals);
    report.sigma = sigma_population(report.epoch_finals);
    report.transcript_hash = run_hash;
    return report;
}

} // namespace lplh
