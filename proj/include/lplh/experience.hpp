#pragma once

#include "lplh/env.hpp"
#include "lplh/parsers.hpp"

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lplh {

// Structured summary of one scoring event (gain, loss, or death).
struct ExperienceRecord {
    int id = -1;
    std::string location;
    std::string situation;
    std::vector<std::string> puzzle_steps;
    std::string trigger_step;
    int delta = 0;
    std::string lesson;
    bool earn = false; // exactly one of earn/lose lesson is populated
    std::vector<std::string> tags; // <= 4, room tag included
    std::string room_tag;
    std::string difficulty = "unknown";
    int epoch = 0;
    int step = 0;
    bool degraded = false; // built by the template fallback

    nlohmann::json to_json() const;
    static ExperienceRecord from_json(const nlohmann::json& j);
    // Text the record is embedded and retrieved by.
    std::string retrieval_text() const;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<float> embed(const std::string& text) const = 0;
    virtual size_t dimension() const = 0;
};

// Deterministic token-hash embedder for offline runs: fixed 256 buckets,
// L2-normalized counts.
class HashingEmbedder final : public Embedder {
public:
    static constexpr size_t kDim = 256;
    std::vector<float> embed(const std::string& text) const override;
    size_t dimension() const override { return kDim; }
};

// Append-only store with a flat cosine-similarity index.
class ExperienceStore {
public:
    explicit ExperienceStore(std::shared_ptr<Embedder> embedder);

    // Assigns the record id, embeds it, appends. Throws StoreRejected on an
    // embedding dimension mismatch.
    int store(ExperienceRecord rec);

    // Top-k by cosine similarity; ties broken by recency (newer id first).
    std::vector<std::pair<ExperienceRecord, float>> retrieve(const std::string& query,
                                                             size_t k) const;

    size_t size() const { return records_.size(); }
    const std::vector<ExperienceRecord>& records() const { return records_; }
    const std::vector<std::vector<float>>& vectors() const { return vectors_; }

    // Append-only JSONL record log + vector sidecar, reloadable to resume.
    void save(const std::string& records_path, const std::string& vectors_path) const;
    static ExperienceStore load(std::shared_ptr<Embedder> embedder,
                                const std::string& records_path,
                                const std::string& vectors_path);

private:
    std::shared_ptr<Embedder> embedder_;
    std::vector<ExperienceRecord> records_;
    std::vector<std::vector<float>> vectors_;
};

// True when a scoring event (gain, loss, or death) warrants a summary.
bool should_summarize(int score_delta, TerminalKind terminal_kind);

// One turn of summarizable history.
struct HistoryTurn {
    std::string action;
    std::string observation;
    bool valid = true;
};

// Deterministic template-based record, used when no summarizer model is
// configured or its response cannot be parsed.
ExperienceRecord fallback_record(const std::vector<HistoryTurn>& window,
                                 int score_delta, TerminalKind terminal_kind,
                                 const std::string& location, int epoch, int step);

// Builds a record from parsed summarizer output plus event context.
ExperienceRecord record_from_fields(const ExperienceFields& fields, int score_delta,
                                    TerminalKind terminal_kind,
                                    const std::string& fallback_location, int epoch,
                                    int step);

// Deterministic retrieval query: current room plus observation headline.
std::string build_query(const std::string& location, const std::string& observation);

} // namespace lplh
