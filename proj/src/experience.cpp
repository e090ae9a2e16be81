#include "lplh/experience.hpp"

#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lplh {

using nlohmann::json;

json ExperienceRecord::to_json() const {
    return json{{"id", id},
                {"location", location},
                {"situation", situation},
                {"puzzle_steps", puzzle_steps},
                {"trigger_step", trigger_step},
                {"delta", delta},
                {"lesson", lesson},
                {"earn", earn},
                {"tags", tags},
                {"room_tag", room_tag},
                {"difficulty", difficulty},
                {"epoch", epoch},
                {"step", step},
                {"degraded", degraded}};
}

ExperienceRecord ExperienceRecord::from_json(const json& j) {
    ExperienceRecord r;
    r.id = j.at("id").get<int>();
    r.location = j.value("location", "");
    r.situation = j.value("situation", "");
    r.puzzle_steps = j.value("puzzle_steps", std::vector<std::string>{});
    r.trigger_step = j.value("trigger_step", "");
    r.delta = j.value("delta", 0);
    r.lesson = j.value("lesson", "");
    r.earn = j.value("earn", false);
    r.tags = j.value("tags", std::vector<std::string>{});
    r.room_tag = j.value("room_tag", "");
    r.difficulty = j.value("difficulty", "unknown");
    r.epoch = j.value("epoch", 0);
    r.step = j.value("step", 0);
    r.degraded = j.value("degraded", false);
    return r;
}

std::string ExperienceRecord::retrieval_text() const {
    std::string t = location + " " + situation + " " + lesson;
    for (const auto& tag : tags) t += " " + tag;
    return t;
}

std::vector<float> HashingEmbedder::embed(const std::string& input) const {
    std::vector<float> v(kDim, 0.0f);
    std::string token;
    auto flush = [&]() {
        if (token.empty()) return;
        v[text::fnv1a(token) % kDim] += 1.0f;
        token.clear();
    };
    for (char c : input) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else
            flush();
    }
    flush();
    double norm = 0.0;
    for (float x : v) norm += double(x) * x;
    if (norm > 0.0) {
        float inv = static_cast<float>(1.0 / std::sqrt(norm));
        for (float& x : v) x *= inv;
    }
    return v;
}

ExperienceStore::ExperienceStore(std::shared_ptr<Embedder> embedder)
    : embedder_(std::move(embedder)) {}

int ExperienceStore::store(ExperienceRecord rec) {
    std::vector<float> vec = embedder_->embed(rec.retrieval_text());
    if (vec.size() != embedder_->dimension())
        throw StoreRejected("embedding dimension mismatch");
    rec.id = static_cast<int>(records_.size());
    records_.push_back(std::move(rec));
    vectors_.push_back(std::move(vec));
    return records_.back().id;
}

std::vector<std::pair<ExperienceRecord, float>>
ExperienceStore::retrieve(const std::string& query, size_t k) const {
    std::vector<std::pair<ExperienceRecord, float>> out;
    if (records_.empty() || k == 0) return out;
    std::vector<float> q = embedder_->embed(query);
    std::vector<std::pair<float, int>> scored; // (similarity, id)
    for (size_t i = 0; i < records_.size(); ++i) {
        float dot = 0.0f;
        for (size_t d = 0; d < q.size(); ++d) dot += q[d] * vectors_[i][d];
        scored.emplace_back(dot, static_cast<int>(i));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second; // ties: newer first
    });
    for (size_t i = 0; i < scored.size() && out.size() < k; ++i)
        out.emplace_back(records_[scored[i].second], scored[i].first);
    return out;
}

void ExperienceStore::save(const std::string& records_path,
                           const std::string& vectors_path) const {
    std::ofstream recs(records_path);
    for (const auto& r : records_) recs << r.to_json().dump() << "\n";
    std::ofstream vecs(vectors_path);
    for (const auto& v : vectors_) {
        json row = v;
        vecs << row.dump() << "\n";
    }
}

ExperienceStore ExperienceStore::load(std::shared_ptr<Embedder> embedder,
                                      const std::string& records_path,
                                      const std::string& vectors_path) {
    ExperienceStore store(std::move(embedder));
    std::ifstream recs(records_path);
    std::string line;
    while (std::getline(recs, line)) {
        if (text::trim(line).empty()) continue;
        store.records_.push_back(ExperienceRecord::from_json(json::parse(line)));
    }
    std::ifstream vecs(vectors_path);
    while (std::getline(vecs, line)) {
        if (text::trim(line).empty()) continue;
        store.vectors_.push_back(json::parse(line).get<std::vector<float>>());
    }
    if (store.records_.size() != store.vectors_.size())
        throw StoreRejected("record log and vector sidecar are out of sync");
    return store;
}

bool should_summarize(int score_delta, TerminalKind terminal_kind) {
    return score_delta != 0 || terminal_kind == TerminalKind::death;
}

namespace {

// Objects the player interacted with or saw, pulled from the window.
std::vector<std::string> window_objects(const std::vector<HistoryTurn>& window) {
    std::vector<std::string> out;
    auto add = [&](const std::string& o) {
        if (!o.empty() && std::find(out.begin(), out.end(), o) == out.end())
            out.push_back(o);
    };
    for (const auto& t : window) {
        for (const auto& line : text::split(t.observation, '\n')) {
            std::string l = text::trim(line);
            if (l.starts_with("There is ") && l.ends_with(" here."))
                add(text::strip_article(l.substr(9, l.size() - 9 - 6)));
        }
    }
    return out;
}

} // namespace

ExperienceRecord fallback_record(const std::vector<HistoryTurn>& window,
                                 int score_delta, TerminalKind terminal_kind,
                                 const std::string& location, int epoch, int step) {
    ExperienceRecord r;
    r.location = location.empty() ? "unknown" : location;
    r.delta = score_delta;
    r.epoch = epoch;
    r.step = step;
    r.degraded = true;
    r.difficulty = "unknown";
    for (const auto& t : window)
        if (t.valid && !t.action.empty()) r.puzzle_steps.push_back(t.action);
    if (!r.puzzle_steps.empty()) r.trigger_step = r.puzzle_steps.back();
    std::vector<std::string> seen = window_objects(window);
    r.situation = "Player was at " + r.location + " after " +
                  std::to_string(r.puzzle_steps.size()) + " actions.";
    bool death = terminal_kind == TerminalKind::death;
    if (score_delta > 0 && !death) {
        r.earn = true;
        r.lesson = "Earn Points: " + r.trigger_step + " at " + r.location + " gained " +
                   std::to_string(score_delta) + " points.";
    } else {
        r.earn = false;
        r.lesson = "Lose Points: player " +
                   std::string(death ? "died" : "lost points") + " at " + r.location +
                   " (" + std::to_string(score_delta) + " points).";
        if (!seen.empty())
            r.lesson += " Objects noticed before: " + text::join(seen, ", ") +
                        ". Consider using them next time.";
        else
            r.lesson += " No useful objects were found; explore for tools first.";
    }
    r.room_tag = r.location;
    r.tags.push_back(r.location);
    if (!seen.empty()) r.tags.push_back(seen.front());
    if (!r.trigger_step.empty() && r.tags.size() < 4) r.tags.push_back(r.trigger_step);
    return r;
}

ExperienceRecord record_from_fields(const ExperienceFields& fields, int score_delta,
                                    TerminalKind terminal_kind,
                                    const std::string& fallback_location, int epoch,
                                    int step) {
    ExperienceRecord r;
    r.location = fields.locations.empty() ? fallback_location : fields.locations.front();
    r.situation = fields.body;
    r.puzzle_steps = fields.steps;
    if (!fields.steps.empty()) r.trigger_step = fields.steps.back();
    r.delta = score_delta;
    r.earn = score_delta > 0 && terminal_kind != TerminalKind::death;
    r.lesson = r.earn ? "Earn Points: see summary." : "Lose Points: see summary.";
    // prefer the body's own lesson lines when marked
    for (const auto& line : text::split(fields.body, '\n')) {
        std::string l = text::trim(line);
        if (r.earn && l.find("*Earn Points*") != std::string::npos) r.lesson = l;
        if (!r.earn && l.find("*Lose Points*") != std::string::npos) r.lesson = l;
    }
    r.tags = fields.tags;
    r.room_tag = fields.room_tag;
    r.difficulty = fields.difficulty;
    r.epoch = epoch;
    r.step = step;
    return r;
}

std::string build_query(const std::string& location, const std::string& observation) {
    std::string headline;
    for (const auto& line : text::split(observation, '\n')) {
        headline = text::trim(line);
        if (!headline.empty()) break;
    }
    return location + " " + headline;
}

} // namespace lplh
