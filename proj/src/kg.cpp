#include "lplh/kg.hpp"

#include "lplh/env.hpp"
#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <algorithm>

namespace lplh {

using nlohmann::json;
using text::lower;
using text::trim;

namespace {

bool is_location_placeholder(const std::string& s) {
    std::string l = lower(trim(s));
    return l == "location" || l == "[location]" || l == "current location";
}

std::string head_noun(const std::string& name) {
    auto parts = text::words(lower(name));
    return parts.empty() ? std::string{} : parts.back();
}

} // namespace

void KnowledgeGraph::detach_object(const std::string& object) {
    inventory_.erase(object);
    containment_.erase(object);
    for (auto& [name, room] : rooms_) {
        room.objects.erase(object);
        room.tentative_objects.erase(object);
    }
}

std::optional<std::string> KnowledgeGraph::find_object(const std::string& noun) const {
    std::string n = lower(trim(noun));
    auto matches = [&](const std::string& key) {
        return lower(key) == n || head_noun(key) == n;
    };
    for (const auto& o : inventory_)
        if (matches(o)) return o;
    auto room_it = rooms_.find(player_location_);
    if (room_it != rooms_.end()) {
        for (const auto& o : room_it->second.objects)
            if (matches(o)) return o;
        for (const auto& o : room_it->second.tentative_objects)
            if (matches(o)) return o;
    }
    for (const auto& [o, c] : containment_)
        if (matches(o)) return o;
    for (const auto& [name, room] : rooms_) {
        for (const auto& o : room.objects)
            if (matches(o)) return o;
        for (const auto& o : room.tentative_objects)
            if (matches(o)) return o;
    }
    return std::nullopt;
}

void KnowledgeGraph::ingest_one(const Triple& t, int step) {
    std::string subject = trim(t.subject);
    std::string relation = lower(trim(t.relation));
    std::string object = trim(t.object);

    if (lower(subject) == "you" && relation == "in") {
        rooms_[object]; // create if new
        visited_.insert(object);
        if (pending_move_ && object != pending_move_->first) {
            const auto& [from, dir] = *pending_move_;
            Room& src = rooms_[from];
            src.exits[dir] = object;
            src.tentative_exits.erase(dir);
            std::string opp = opposite_direction(dir);
            if (!opp.empty()) {
                Room& dst = rooms_[object];
                dst.exits[opp] = from;
                dst.tentative_exits.erase(opp);
            }
        }
        pending_move_.reset();
        player_location_ = object;
        provenance_["room:" + object] = step;
        return;
    }

    if (is_location_placeholder(subject)) {
        if (player_location_.empty()) {
            ++dropped_;
            return;
        }
        subject = player_location_;
    }

    if (relation == "have") {
        Room& room = rooms_[subject];
        // newest fact wins: the object is wherever we last saw it
        std::string key = object;
        if (auto known = find_object(object); known && head_noun(*known) == head_noun(object))
            key = *known;
        detach_object(key);
        room.objects.insert(key);
        room.tentative_objects.erase(key);
        provenance_["obj:" + key] = step;
        return;
    }

    if (is_direction(relation)) {
        Room& room = rooms_[subject];
        if (object.starts_with("to ")) {
            if (!room.exits.count(relation)) room.tentative_exits.insert(relation);
        } else {
            room.exits[relation] = object;
            room.tentative_exits.erase(relation);
            rooms_[object];
        }
        provenance_["exit:" + subject + ":" + relation] = step;
        return;
    }

    if (relation == "in" || relation == "on") {
        detach_object(subject);
        containment_[subject] = Containment{relation, object};
        provenance_["contain:" + subject] = step;
        return;
    }

    if (relation == "need" || relation == "require") {
        needs_[subject].insert(object);
        provenance_["need:" + subject] = step;
        return;
    }

    ++dropped_;
}

void KnowledgeGraph::ingest_triples(const std::vector<Triple>& triples, int step) {
    for (const auto& t : triples) ingest_one(t, step);
    pending_move_.reset();
    last_step_ = std::max(last_step_, step);
}

void KnowledgeGraph::apply_action(const ActionSplit& split, bool valid, int step) {
    last_step_ = std::max(last_step_, step);
    const std::string verb = lower(split.verb_template);

    if (is_direction(verb)) {
        if (valid) {
            if (!player_location_.empty()) pending_move_ = {player_location_, verb};
        } else if (!player_location_.empty()) {
            rooms_[player_location_].tentative_exits.erase(verb);
        }
        return;
    }
    if (!valid || split.objects.empty()) return;

    if (verb == "take &") {
        std::string key = split.objects[0];
        if (auto known = find_object(key)) key = *known;
        detach_object(key);
        inventory_.insert(key);
        provenance_["obj:" + key] = step;
    } else if (verb == "drop &") {
        std::string key = split.objects[0];
        if (auto known = find_object(key)) key = *known;
        detach_object(key);
        if (!player_location_.empty()) {
            rooms_[player_location_].objects.insert(key);
            provenance_["obj:" + key] = step;
        }
    }
    // other verbs leave the graph untouched beyond provenance
}

std::vector<std::string> KnowledgeGraph::visible_objects() const {
    std::vector<std::string> out;
    auto it = rooms_.find(player_location_);
    if (it == rooms_.end()) return out;
    for (const auto& o : it->second.objects) out.push_back(o);
    for (const auto& [o, c] : containment_)
        if (it->second.objects.count(c.container)) out.push_back(o);
    return out;
}

std::string KnowledgeGraph::serialize_context() const {
    json j;
    j["player"] = {{"location", player_location_}, {"temp_have", inventory_}};
    auto it = rooms_.find(player_location_);
    if (it != rooms_.end()) {
        const Room& r = it->second;
        json cur;
        cur["have"] = r.objects;
        cur["may_have"] = r.tentative_objects;
        json dir = json::object();
        for (const auto& [d, target] : r.exits) dir[d] = target;
        cur["direction"] = dir;
        cur["may_direction"] = r.tentative_exits;
        json need = json::object();
        for (const auto& [subject, reqs] : needs_) {
            bool local = subject == player_location_ || r.objects.count(subject) ||
                         inventory_.count(subject);
            if (local) need[subject] = reqs;
        }
        cur["need"] = need;
        json contains = json::array();
        for (const auto& [o, c] : containment_)
            if (r.objects.count(c.container))
                contains.push_back(json{{"object", o},
                                        {"relation", c.relation},
                                        {"container", c.container}});
        cur["contains"] = contains;
        j["current_room"] = cur;
    }
    json world = json::object();
    for (const auto& [name, room] : rooms_) {
        json exits = json::object();
        for (const auto& [d, target] : room.exits) exits[d] = target;
        world[name] = {{"direction", exits}, {"may_direction", room.tentative_exits}};
    }
    j["rooms"] = world;
    return j.dump(2);
}

std::pair<int, int> KnowledgeGraph::stats() const {
    std::set<std::string> known(inventory_.begin(), inventory_.end());
    for (const auto& [name, room] : rooms_) {
        known.insert(room.objects.begin(), room.objects.end());
        known.insert(room.tentative_objects.begin(), room.tentative_objects.end());
    }
    for (const auto& [o, c] : containment_) known.insert(o);
    return {static_cast<int>(visited_.size()), static_cast<int>(known.size())};
}

void KnowledgeGraph::reset_player() {
    player_location_.clear();
    inventory_.clear();
    pending_move_.reset();
}

json KnowledgeGraph::export_snapshot() const {
    json j;
    j["schema"] = 1;
    j["player"] = {{"location", player_location_}, {"inventory", inventory_}};
    j["visited"] = visited_;
    json rooms = json::object();
    for (const auto& [name, room] : rooms_) {
        json exits = json::object();
        for (const auto& [d, t] : room.exits) exits[d] = t;
        rooms[name] = {{"objects", room.objects},
                       {"tentative_objects", room.tentative_objects},
                       {"exits", exits},
                       {"tentative_exits", room.tentative_exits}};
    }
    j["rooms"] = rooms;
    json contains = json::object();
    for (const auto& [o, c] : containment_)
        contains[o] = {{"relation", c.relation}, {"container", c.container}};
    j["containment"] = contains;
    json needs = json::object();
    for (const auto& [s, reqs] : needs_) needs[s] = reqs;
    j["needs"] = needs;
    j["provenance"] = provenance_;
    return j;
}

KnowledgeGraph KnowledgeGraph::import_snapshot(const json& j) {
    if (j.value("schema", 0) != 1) throw Error("unsupported KG snapshot schema");
    KnowledgeGraph g;
    g.player_location_ = j.at("player").value("location", "");
    for (const auto& o : j.at("player").at("inventory"))
        g.inventory_.insert(o.get<std::string>());
    for (const auto& v : j.at("visited")) g.visited_.insert(v.get<std::string>());
    for (auto& [name, r] : j.at("rooms").items()) {
        Room room;
        for (const auto& o : r.at("objects")) room.objects.insert(o.get<std::string>());
        for (const auto& o : r.at("tentative_objects"))
            room.tentative_objects.insert(o.get<std::string>());
        for (auto& [d, t] : r.at("exits").items()) room.exits[d] = t.get<std::string>();
        for (const auto& d : r.at("tentative_exits"))
            room.tentative_exits.insert(d.get<std::string>());
        g.rooms_[name] = std::move(room);
    }
    for (auto& [o, c] : j.at("containment").items())
        g.containment_[o] = Containment{c.at("relation").get<std::string>(),
                                        c.at("container").get<std::string>()};
    for (auto& [s, reqs] : j.at("needs").items())
        for (const auto& r : reqs) g.needs_[s].insert(r.get<std::string>());
    if (j.contains("provenance"))
        for (auto& [k, v] : j.at("provenance").items()) g.provenance_[k] = v.get<int>();
    return g;
}

void KnowledgeGraph::check_invariants() const {
    if (!player_location_.empty() && !rooms_.count(player_location_))
        throw Error("player location is not a known room: " + player_location_);
    std::map<std::string, int> holders;
    for (const auto& o : inventory_) holders[o]++;
    for (const auto& [name, room] : rooms_)
        for (const auto& o : room.objects) holders[o]++;
    for (const auto& [o, c] : containment_) holders[o]++;
    for (const auto& [o, n] : holders)
        if (n > 1) throw Error("object held in multiple places: " + o);
    for (const auto& [name, room] : rooms_)
        for (const auto& d : room.tentative_exits)
            if (room.exits.count(d))
                throw Error("exit both confirmed and tentative: " + name + "/" + d);
}

} // namespace lplh
