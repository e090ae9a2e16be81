#pragma once

#include "lplh/agent.hpp"
#include "lplh/env.hpp"
#include "lplh/gateway.hpp"

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lplh {

struct RunConfig {
    std::string env = "toy";        // "toy" or "adapter:<command>"
    std::string fixture_path;       // world document; empty = bundled manor
    std::string agent = "lplh";     // "lplh" | "baseline" | "scripted:<file>"
    int epochs = 10;
    int steps = 250;                // env steps per epoch
    uint64_t seed = 7;
    bool no_kg = false;
    bool no_exp = false;
    bool no_as = false;
    bool fresh_as = false;          // re-seed the action space every epoch
    int stagnation_summary = 0;
    std::string out_dir;
    nlohmann::json gateway;         // {"type":"none"|"scripted"|"remote", ...}

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::string& path);
};

struct RunReport {
    std::string agent;
    int epochs = 0;
    int steps_per_epoch = 0;
    std::vector<int> epoch_finals;
    double raw = 0.0;               // last-3 mean for lplh, mean of all otherwise
    int max_final = 0;
    double sigma = 0.0;             // population form
    int total_steps = 0;
    uint64_t transcript_hash = 0;
    std::map<std::string, int> module_calls;

    nlohmann::json to_json() const;
};

// --- metric primitives (pure functions of the epoch finals) ---

double mean_all(const std::vector<int>& finals);
double mean_last3(const std::vector<int>& finals);
int max_final(const std::vector<int>& finals);
double sigma_population(const std::vector<int>& finals);
// Dispatches on the agent kind string.
double raw_score(const std::string& agent, const std::vector<int>& finals);

// CSV learning-curve table; steps are scaled to [0, 1] over the run.
std::string emit_curves(const std::vector<CurvePoint>& points, int total_steps);

std::unique_ptr<Environment> make_env(const RunConfig& config);
std::unique_ptr<Gateway> make_gateway(const nlohmann::json& spec);

// Executes the full epoch protocol. When `out_dir` is set, the run directory
// receives report.json, curves.csv, episodes.jsonl, module snapshots, and the
// gateway call log.
RunReport run(const RunConfig& config);

struct ReplayResult {
    bool ok = true;
    int epoch = 0;
    int episode = 0;
    int step = 0;
    std::string message;
};

// Re-executes a logged run against a fresh toy engine and cross-checks scores
// and observation hashes; reports the exact step of the first divergence.
// Adapter-backed logs are not replayable (throws Unsupported).
ReplayResult replay(const std::string& log_path);

// Recomputes the report from the episode log alone.
RunReport report_from_logs(const std::string& run_dir);

} // namespace lplh
