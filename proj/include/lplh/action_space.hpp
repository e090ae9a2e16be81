#pragma once

#include "lplh/parsers.hpp"

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lplh {

// Learned space of verified verb templates and object vocabulary.
// The 10 directions plus look/inventory are present from initialization.
class ActionSpace {
public:
    struct VerbTemplate {
        std::string pattern; // "&" per object slot
        int arity = 0;
        int first_seen = 0;
        int hits = 0;
    };

    ActionSpace();

    // Inserts (or hit-counts) a validated split. Idempotent on sets.
    void record_valid(const ActionSplit& split, int step);

    // Candidate commands for the current location. Deterministic order:
    // the 10 directions first, then templates by descending hit count
    // (ties: first seen, then pattern), each instantiated with all ordered
    // selections without repetition from the object pool. The pool is
    // visible + inventory, deduplicated, most recently learned objects first.
    std::vector<std::string> pair(const std::vector<std::string>& visible,
                                  const std::vector<std::string>& inventory,
                                  size_t cap = 60) const;

    // (n_templates, n_objects)
    std::pair<int, int> counts() const;

    bool has_template(const std::string& pattern) const {
        return templates_.count(pattern) > 0;
    }
    const std::map<std::string, VerbTemplate>& templates() const { return templates_; }
    const std::map<std::string, int>& objects() const { return objects_; }

    // The object pool ordering used by pair(), exposed so oracles can share it.
    std::vector<std::string> pool_order(const std::vector<std::string>& visible,
                                        const std::vector<std::string>& inventory) const;
    // Template ordering used by pair() after the leading directions.
    std::vector<const VerbTemplate*> template_order() const;

    nlohmann::json export_snapshot() const;
    static ActionSpace import_snapshot(const nlohmann::json& j);

private:
    std::map<std::string, VerbTemplate> templates_;
    std::map<std::string, int> objects_; // name -> first seen step
};

} // namespace lplh
