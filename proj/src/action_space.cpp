#include "lplh/action_space.hpp"

#include "lplh/env.hpp"
#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <algorithm>
#include <functional>

namespace lplh {

using nlohmann::json;

ActionSpace::ActionSpace() {
    for (const auto& dir : directions())
        templates_[dir] = VerbTemplate{dir, 0, 0, 0};
    templates_["look"] = VerbTemplate{"look", 0, 0, 0};
    templates_["inventory"] = VerbTemplate{"inventory", 0, 0, 0};
}

void ActionSpace::record_valid(const ActionSplit& split, int step) {
    std::string pattern = text::trim(split.verb_template);
    if (pattern.empty()) return;
    if (pattern == "i") pattern = "inventory"; // alias of the built-in
    auto [it, inserted] = templates_.try_emplace(
        pattern, VerbTemplate{pattern, split.arity(), step, 0});
    it->second.hits += 1;
    for (const auto& obj : split.objects) objects_.try_emplace(text::trim(obj), step);
}

std::vector<std::string> ActionSpace::pool_order(
    const std::vector<std::string>& visible,
    const std::vector<std::string>& inventory) const {
    std::vector<std::string> pool;
    auto add = [&](const std::string& o) {
        std::string t = text::trim(o);
        if (!t.empty() && std::find(pool.begin(), pool.end(), t) == pool.end())
            pool.push_back(t);
    };
    for (const auto& o : visible) add(o);
    for (const auto& o : inventory) add(o);
    auto recency = [&](const std::string& o) {
        auto it = objects_.find(o);
        return it == objects_.end() ? -1 : it->second;
    };
    std::stable_sort(pool.begin(), pool.end(), [&](const auto& a, const auto& b) {
        return recency(a) > recency(b);
    });
    return pool;
}

std::vector<const ActionSpace::VerbTemplate*> ActionSpace::template_order() const {
    std::vector<const VerbTemplate*> order;
    for (const auto& [pattern, tpl] : templates_)
        if (!is_direction(pattern)) order.push_back(&tpl);
    std::sort(order.begin(), order.end(), [](const VerbTemplate* a, const VerbTemplate* b) {
        if (a->hits != b->hits) return a->hits > b->hits;
        if (a->first_seen != b->first_seen) return a->first_seen < b->first_seen;
        return a->pattern < b->pattern;
    });
    return order;
}

std::vector<std::string> ActionSpace::pair(const std::vector<std::string>& visible,
                                           const std::vector<std::string>& inventory,
                                           size_t cap) const {
    std::vector<std::string> out;
    for (const auto& dir : directions()) {
        if (out.size() >= cap) return out;
        out.push_back(dir);
    }
    const auto pool = pool_order(visible, inventory);
    for (const VerbTemplate* tpl : template_order()) {
        if (out.size() >= cap) break;
        size_t arity = static_cast<size_t>(tpl->arity);
        if (arity == 0) {
            out.push_back(tpl->pattern);
            continue;
        }
        if (pool.size() < arity) continue;
        // ordered selections without repetition, lexicographic by pool index
        std::vector<size_t> idx;
        std::vector<bool> used(pool.size(), false);
        std::function<bool()> emit = [&]() -> bool {
            if (idx.size() == arity) {
                ActionSplit s{tpl->pattern, {}};
                for (size_t i : idx) s.objects.push_back(pool[i]);
                out.push_back(s.render());
                return out.size() < cap;
            }
            for (size_t i = 0; i < pool.size(); ++i) {
                if (used[i]) continue;
                used[i] = true;
                idx.push_back(i);
                bool keep = emit();
                idx.pop_back();
                used[i] = false;
                if (!keep) return false;
            }
            return true;
        };
        if (!emit()) break;
    }
    return out;
}

std::pair<int, int> ActionSpace::counts() const {
    return {static_cast<int>(templates_.size()), static_cast<int>(objects_.size())};
}

json ActionSpace::export_snapshot() const {
    json j;
    j["schema"] = 1;
    j["templates"] = json::array();
    for (const auto& [pattern, tpl] : templates_)
        j["templates"].push_back(json{{"pattern", tpl.pattern},
                                      {"arity", tpl.arity},
                                      {"first_seen", tpl.first_seen},
                                      {"hits", tpl.hits}});
    json objs = json::object();
    for (const auto& [name, step] : objects_) objs[name] = step;
    j["objects"] = objs;
    return j;
}

ActionSpace ActionSpace::import_snapshot(const json& j) {
    if (j.value("schema", 0) != 1) throw Error("unsupported AS snapshot schema");
    ActionSpace as;
    for (const auto& t : j.at("templates")) {
        VerbTemplate tpl{t.at("pattern").get<std::string>(), t.at("arity").get<int>(),
                         t.at("first_seen").get<int>(), t.at("hits").get<int>()};
        as.templates_[tpl.pattern] = tpl;
    }
    for (auto& [name, step] : j.at("objects").items())
        as.objects_[name] = step.get<int>();
    return as;
}

} // namespace lplh
