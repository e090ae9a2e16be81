#pragma once

#include <string>
#include <vector>

namespace lplh::prompts {

// Versioned instruction templates, one per model role.
extern const std::string kActionValidationV1;
extern const std::string kRelationExtractionV1;
extern const std::string kSplittingActionV1;
extern const std::string kBaselineActionV1;
extern const std::string kLplhActionV1;
extern const std::string kExperienceSummaryV1;

// Appended when a response failed to parse and the role is re-invoked.
extern const std::string kCorrectiveSuffix;

struct HistoryEntry {
    std::string action;
    std::string observation;
    std::string reason;
};

std::string fill_validation(const std::string& action, const std::string& observation);
std::string fill_extraction(const std::string& action, const std::string& observation);
std::string fill_split(const std::string& action);
std::string fill_baseline(const std::vector<HistoryEntry>& history,
                          const std::string& observation);
// Empty sections are rendered as "none" so ablations keep the same shape.
std::string fill_lplh(const std::string& kg_context,
                      const std::vector<std::string>& candidates,
                      const std::vector<std::string>& experiences,
                      const std::vector<HistoryEntry>& history,
                      const std::string& observation);
std::string fill_summary(const std::vector<HistoryEntry>& window, int score,
                         int score_delta);

} // namespace lplh::prompts
