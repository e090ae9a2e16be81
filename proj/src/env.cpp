#include "lplh/env.hpp"

#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <algorithm>

namespace lplh {

using nlohmann::json;
using text::trim;
using text::lower;

std::string to_string(TerminalKind k) {
    switch (k) {
    case TerminalKind::none: return "none";
    case TerminalKind::victory: return "victory";
    case TerminalKind::death: return "death";
    case TerminalKind::step_limit: return "step_limit";
    }
    return "none";
}

const std::vector<std::string>& directions() {
    static const std::vector<std::string> dirs = {
        "north", "south", "east", "west", "southeast",
        "southwest", "northeast", "northwest", "up", "down"};
    return dirs;
}

bool is_direction(const std::string& word) {
    const auto& d = directions();
    return std::find(d.begin(), d.end(), word) != d.end();
}

std::string opposite_direction(const std::string& dir) {
    static const std::map<std::string, std::string> opp = {
        {"north", "south"},         {"south", "north"},
        {"east", "west"},           {"west", "east"},
        {"southeast", "northwest"}, {"northwest", "southeast"},
        {"southwest", "northeast"}, {"northeast", "southwest"},
        {"up", "down"},             {"down", "up"}};
    auto it = opp.find(dir);
    return it == opp.end() ? std::string{} : it->second;
}

nlohmann::json Environment::ground_truth() const {
    throw Unsupported("ground_truth is only available on the toy engine");
}

// --- fixture serialization ---

WorldFixture WorldFixture::from_json(const json& j) {
    WorldFixture f;
    f.id = j.at("id").get<std::string>();
    f.max_score = j.value("max_score", 0);
    for (const auto& r : j.at("rooms")) {
        RoomDef room;
        room.id = r.at("id").get<std::string>();
        room.name = r.at("name").get<std::string>();
        room.description = r.value("description", "");
        room.dark = r.value("dark", false);
        if (r.contains("exits"))
            for (auto& [dir, target] : r.at("exits").items())
                room.exits[dir] = target.get<std::string>();
        if (r.contains("signposted"))
            for (const auto& d : r.at("signposted")) room.signposted.insert(d.get<std::string>());
        f.rooms.push_back(std::move(room));
    }
    for (const auto& o : j.at("objects")) {
        ObjectDef obj;
        obj.id = o.at("id").get<std::string>();
        obj.name = o.at("name").get<std::string>();
        obj.location = o.at("location").get<std::string>();
        obj.portable = o.value("portable", true);
        obj.light_source = o.value("light_source", false);
        obj.locked = o.value("locked", false);
        obj.openable = o.value("openable", false);
        obj.key_id = o.value("key", "");
        obj.climb_to = o.value("climb_to", "");
        f.objects.push_back(std::move(obj));
    }
    if (j.contains("triggers"))
        for (const auto& t : j.at("triggers")) {
            TriggerDef trg;
            trg.id = t.at("id").get<std::string>();
            trg.on = t.at("on").get<std::string>();
            trg.object = t.value("object", "");
            trg.command = t.value("command", "");
            trg.location = t.value("location", "");
            trg.delta = t.value("delta", 0);
            trg.message = t.value("message", "");
            trg.once = t.value("once", true);
            f.triggers.push_back(std::move(trg));
        }
    if (j.contains("hazards"))
        for (const auto& h : j.at("hazards")) {
            HazardDef hz;
            hz.room = h.at("room").get<std::string>();
            hz.delta = h.value("delta", 0);
            hz.message = h.value("message", "");
            f.hazards.push_back(std::move(hz));
        }
    f.validate();
    return f;
}

json WorldFixture::to_json() const {
    json j;
    j["id"] = id;
    j["max_score"] = max_score;
    j["rooms"] = json::array();
    for (const auto& r : rooms) {
        json room{{"id", r.id}, {"name", r.name}, {"description", r.description}};
        if (r.dark) room["dark"] = true;
        json exits = json::object();
        for (auto& [dir, target] : r.exits) exits[dir] = target;
        room["exits"] = exits;
        if (!r.signposted.empty()) room["signposted"] = r.signposted;
        j["rooms"].push_back(room);
    }
    j["objects"] = json::array();
    for (const auto& o : objects) {
        json obj{{"id", o.id}, {"name", o.name}, {"location", o.location}};
        if (!o.portable) obj["portable"] = false;
        if (o.light_source) obj["light_source"] = true;
        if (o.locked) obj["locked"] = true;
        if (o.openable) obj["openable"] = true;
        if (!o.key_id.empty()) obj["key"] = o.key_id;
        if (!o.climb_to.empty()) obj["climb_to"] = o.climb_to;
        j["objects"].push_back(obj);
    }
    j["triggers"] = json::array();
    for (const auto& t : triggers) {
        json trg{{"id", t.id}, {"on", t.on}, {"delta", t.delta}, {"once", t.once}};
        if (!t.object.empty()) trg["object"] = t.object;
        if (!t.command.empty()) trg["command"] = t.command;
        if (!t.location.empty()) trg["location"] = t.location;
        if (!t.message.empty()) trg["message"] = t.message;
        j["triggers"].push_back(trg);
    }
    j["hazards"] = json::array();
    for (const auto& h : hazards) {
        j["hazards"].push_back(json{{"room", h.room}, {"delta", h.delta}, {"message", h.message}});
    }
    return j;
}

void WorldFixture::validate() const {
    auto has_room = [&](const std::string& rid) {
        return std::any_of(rooms.begin(), rooms.end(),
                           [&](const RoomDef& r) { return r.id == rid; });
    };
    auto has_object = [&](const std::string& oid) {
        return std::any_of(objects.begin(), objects.end(),
                           [&](const ObjectDef& o) { return o.id == oid; });
    };
    if (rooms.empty()) throw Error("fixture " + id + " has no rooms");
    for (const auto& r : rooms)
        for (auto& [dir, target] : r.exits) {
            if (!is_direction(dir))
                throw Error("fixture exit uses unknown direction: " + dir);
            if (!has_room(target))
                throw Error("fixture exit references undefined room: " + target);
        }
    for (const auto& o : objects) {
        if (!has_room(o.location)) throw Error("object in undefined room: " + o.id);
        if (!o.key_id.empty() && !has_object(o.key_id))
            throw Error("object key references undefined object: " + o.key_id);
        if (!o.climb_to.empty() && !has_room(o.climb_to))
            throw Error("climb target undefined: " + o.climb_to);
    }
    for (const auto& t : triggers)
        if (!t.object.empty() && !has_object(t.object))
            throw Error("trigger references undefined object: " + t.object);
    for (const auto& h : hazards)
        if (!has_room(h.room)) throw Error("hazard references undefined room: " + h.room);
}

WorldFixture miniature_manor() {
    WorldFixture f;
    f.id = "miniature_manor";
    f.max_score = 35;
    f.rooms = {
        {"foyer", "Foyer", "A grand entrance hall with a marble floor.",
         {{"north", "library"}, {"east", "garden"}, {"down", "basement"}},
         {"north"}, false},
        {"library", "Library", "A quiet room lined with towering bookshelves.",
         {{"south", "foyer"}, {"up", "attic"}},
         {"south"}, false},
        {"attic", "Attic", "A cramped space under the rafters, thick with dust.",
         {{"down", "library"}}, {}, false},
        {"garden", "Garden", "An overgrown garden behind the manor.",
         {{"west", "foyer"}, {"up", "treetop"}},
         {"west"}, false},
        {"treetop", "TreeTop", "High in the branches of an old oak, swaying gently.",
         {{"down", "garden"}}, {}, false},
        {"basement", "Basement", "A cold stone cellar with damp walls.",
         {{"up", "foyer"}}, {}, true},
    };
    f.objects = {
        {"lantern", "lantern", "library", true, true, false, false, "", ""},
        {"key", "brass key", "attic", true, false, false, false, "", ""},
        {"chest", "chest", "foyer", false, false, true, true, "key", ""},
        {"egg", "jeweled egg", "treetop", true, false, false, false, "", ""},
        {"trophy", "trophy", "basement", true, false, false, false, "", ""},
        {"tree", "tree", "garden", false, false, false, false, "", "treetop"},
    };
    f.triggers = {
        {"chest_unlocked", "unlock", "chest", "", "foyer", 10,
         "The lock springs open with a satisfying click.", true},
        {"egg_taken", "take", "egg", "", "", 5, "", true},
        {"trophy_taken", "take", "trophy", "", "", 20, "", true},
    };
    f.hazards = {
        {"basement", -10,
         "Oh no! A lurking grue slithers out of the darkness and devours you!"},
    };
    return f;
}

std::vector<std::string> manor_walkthrough() {
    return {
        "look",
        "north",
        "take lantern",
        "up",
        "take key",
        "i",
        "down",
        "south",
        "unlock chest with key",
        "open chest",
        "drop key",
        "east",
        "climb tree",
        "take egg",
        "down",
        "west",
        "turn on lantern",
        "down",
        "take trophy",
    };
}

// --- toy engine ---

ToyEngine::ToyEngine(WorldFixture fixture) : fixture_(std::move(fixture)) {
    fixture_.validate();
}

const RoomDef& ToyEngine::room(const std::string& id) const {
    for (const auto& r : fixture_.rooms)
        if (r.id == id) return r;
    throw Error("unknown room id: " + id);
}

const ObjectDef* ToyEngine::find_object_def(const std::string& id) const {
    for (const auto& o : fixture_.objects)
        if (o.id == id) return &o;
    return nullptr;
}

const ObjectDef* ToyEngine::resolve_noun(const std::string& noun,
                                         const std::vector<std::string>& scopes) const {
    std::string n = lower(trim(noun));
    if (n.empty()) return nullptr;
    for (const auto& o : fixture_.objects) {
        const auto& st = objects_.at(o.id);
        if (std::find(scopes.begin(), scopes.end(), st.location) == scopes.end()) continue;
        std::string name = lower(o.name);
        if (name == n || o.id == n) return &o;
        auto parts = text::words(name);
        if (!parts.empty() && parts.back() == n) return &o;
        if (std::find(parts.begin(), parts.end(), n) != parts.end()) return &o;
    }
    return nullptr;
}

bool ToyEngine::has_light() const {
    for (const auto& o : fixture_.objects) {
        const auto& st = objects_.at(o.id);
        if (o.light_source && st.lit && (st.location == "inv" || st.location == location_))
            return true;
    }
    return false;
}

std::string ToyEngine::describe_room(const std::string& room_id) const {
    const RoomDef& r = room(room_id);
    std::string out = r.name + "\n" + r.description;
    for (const auto& o : fixture_.objects) {
        const auto& st = objects_.at(o.id);
        if (st.location != room_id) continue;
        out += "\nThere is a " + o.name + " here.";
        if (st.locked && !o.key_id.empty()) {
            const ObjectDef* key = find_object_def(o.key_id);
            out += "\nThe " + o.name + " is locked; you will need a " + key->name + ".";
        }
    }
    std::vector<std::string> bare;
    for (const auto& dir : directions()) {
        auto it = r.exits.find(dir);
        if (it == r.exits.end()) continue;
        if (r.signposted.count(dir))
            out += "\nTo the " + dir + " is the " + room(it->second).name + ".";
        else
            bare.push_back(dir);
    }
    if (!bare.empty()) {
        std::string list = bare[0];
        for (size_t i = 1; i < bare.size(); ++i)
            list += (i + 1 == bare.size() ? " and " : ", ") + bare[i];
        out += "\nYou can go " + list + " from here.";
    }
    return out;
}

std::string ToyEngine::fire_triggers(const std::string& on, const std::string& object_id,
                                     const std::string& command, int& delta) {
    std::string messages;
    for (const auto& t : fixture_.triggers) {
        if (t.on != on) continue;
        if (!t.object.empty() && t.object != object_id) continue;
        if (!t.command.empty() && t.command != command) continue;
        if (!t.location.empty() && t.location != location_) continue;
        if (t.once && fired_.count(t.id)) continue;
        fired_.insert(t.id);
        delta += t.delta;
        if (!t.message.empty()) messages += "\n" + t.message;
    }
    return messages;
}

StepOutcome ToyEngine::make_outcome(std::string observation, int delta) {
    score_ += delta;
    if (delta > 0)
        observation += "\n[Your score has just gone up by " + std::to_string(delta) +
                       " points.]";
    else if (delta < 0)
        observation += "\n[Your score has just gone down by " + std::to_string(-delta) +
                       " points.]";
    if (fixture_.max_score > 0 && score_ >= fixture_.max_score) {
        terminal_ = true;
        terminal_kind_ = TerminalKind::victory;
        observation += "\n\n*** You have won ***";
    }
    StepOutcome out;
    out.observation = std::move(observation);
    out.score = score_;
    out.score_delta = delta;
    out.moves = moves_;
    out.terminal = terminal_;
    out.terminal_kind = terminal_kind_;
    return out;
}

StepOutcome ToyEngine::reset(uint64_t /*seed*/) {
    objects_.clear();
    for (const auto& o : fixture_.objects)
        objects_[o.id] = ObjState{o.location, false, o.locked, false};
    fired_.clear();
    location_ = fixture_.rooms.front().id;
    score_ = 0;
    moves_ = 0;
    terminal_ = false;
    terminal_kind_ = TerminalKind::none;
    dark_pending_ = false;

    StepOutcome out;
    out.observation = describe_room(location_);
    out.moves = 0;
    return out;
}

StepOutcome ToyEngine::step(const std::string& command) {
    if (terminal_) throw EpisodeOver("step after terminal state");
    ++moves_;

    // One observation of darkness, then the grue.
    if (room(location_).dark && !has_light() && dark_pending_) {
        const HazardDef* hz = nullptr;
        for (const auto& h : fixture_.hazards)
            if (h.room == location_) hz = &h;
        terminal_ = true;
        terminal_kind_ = TerminalKind::death;
        int delta = hz ? hz->delta : 0;
        score_ += delta;
        std::string obs = hz ? hz->message : "Something fatal happens in the dark.";
        if (delta < 0)
            obs += "\n[Your score has just gone down by " + std::to_string(-delta) +
                   " points.]";
        obs += "\n\n*** You have died ***";
        StepOutcome out;
        out.observation = std::move(obs);
        out.score = score_;
        out.score_delta = delta;
        out.moves = moves_;
        out.terminal = true;
        out.terminal_kind = TerminalKind::death;
        return out;
    }

    std::string cmd = lower(trim(command));
    if (cmd.starts_with("go ")) cmd = trim(cmd.substr(3));
    auto reject = [&]() { return make_outcome("You can't do that here.", 0); };
    auto enter = [&](const std::string& room_id) {
        location_ = room_id;
        if (room(room_id).dark && !has_light()) {
            dark_pending_ = true;
            return make_outcome(
                "It is pitch black. You are likely to be eaten by a grue.", 0);
        }
        dark_pending_ = false;
        return make_outcome(describe_room(room_id), 0);
    };

    if (cmd.empty()) return reject();

    if (is_direction(cmd)) {
        const RoomDef& r = room(location_);
        auto it = r.exits.find(cmd);
        if (it == r.exits.end()) return reject();
        return enter(it->second);
    }
    if (cmd == "look" || cmd == "l") {
        return make_outcome(describe_room(location_), 0);
    }
    if (cmd == "i" || cmd == "inventory") {
        std::string obs = "You are carrying:";
        bool any = false;
        for (const auto& o : fixture_.objects)
            if (objects_.at(o.id).location == "inv") {
                obs += "\n  a " + o.name;
                any = true;
            }
        if (!any) obs = "You are empty-handed.";
        return make_outcome(obs, 0);
    }
    if (cmd.starts_with("take ")) {
        const ObjectDef* o = resolve_noun(cmd.substr(5), {location_});
        if (!o || !o->portable) return reject();
        objects_[o->id].location = "inv";
        int delta = 0;
        std::string msg = fire_triggers("take", o->id, cmd, delta);
        return make_outcome("Taken." + msg, delta);
    }
    if (cmd.starts_with("drop ")) {
        const ObjectDef* o = resolve_noun(cmd.substr(5), {"inv"});
        if (!o) return reject();
        objects_[o->id].location = location_;
        return make_outcome("Dropped.", 0);
    }
    if (cmd.starts_with("open ")) {
        const ObjectDef* o = resolve_noun(cmd.substr(5), {location_, "inv"});
        if (!o || !o->openable || objects_[o->id].locked) return reject();
        objects_[o->id].open = true;
        return make_outcome("Opened.", 0);
    }
    if (cmd.starts_with("unlock ")) {
        size_t with = cmd.find(" with ");
        if (with == std::string::npos) return reject();
        const ObjectDef* target = resolve_noun(cmd.substr(7, with - 7), {location_, "inv"});
        const ObjectDef* key = resolve_noun(cmd.substr(with + 6), {"inv"});
        if (!target || !key || !objects_[target->id].locked || target->key_id != key->id)
            return reject();
        objects_[target->id].locked = false;
        int delta = 0;
        std::string msg = fire_triggers("unlock", target->id, cmd, delta);
        return make_outcome("Unlocked." + msg, delta);
    }
    if (cmd.starts_with("turn on ") || cmd.starts_with("turn off ")) {
        bool on = cmd.starts_with("turn on ");
        const ObjectDef* o =
            resolve_noun(cmd.substr(on ? 8 : 9), {location_, "inv"});
        if (!o || !o->light_source) return reject();
        objects_[o->id].lit = on;
        return make_outcome("The " + o->name + " is now " + (on ? "on." : "off."), 0);
    }
    if (cmd.starts_with("climb ")) {
        const ObjectDef* o = resolve_noun(cmd.substr(6), {location_});
        if (!o || o->climb_to.empty()) return reject();
        return enter(o->climb_to);
    }
    // command triggers as an escape hatch for custom fixtures
    {
        int delta = 0;
        std::string msg = fire_triggers("command", "", cmd, delta);
        if (!msg.empty() || delta != 0)
            return make_outcome(trim(msg).empty() ? "Done." : trim(msg), delta);
    }
    return reject();
}

uint64_t ToyEngine::state_hash() const {
    uint64_t h = text::fnv1a(location_);
    for (const auto& [id, st] : objects_) {
        h = text::fnv1a(id, h);
        h = text::fnv1a(st.location, h);
        h = text::fnv1a(std::string{char('0' + st.lit), char('0' + st.locked),
                                    char('0' + st.open)},
                        h);
    }
    for (const auto& t : fired_) h = text::fnv1a(t, h);
    h = text::fnv1a(std::to_string(score_), h);
    return h;
}

json ToyEngine::ground_truth() const {
    json j;
    j["location"] = room(location_).name;
    j["location_id"] = location_;
    std::vector<std::string> inv;
    for (const auto& o : fixture_.objects)
        if (objects_.at(o.id).location == "inv") inv.push_back(o.name);
    std::sort(inv.begin(), inv.end());
    j["inventory"] = inv;
    j["fired"] = fired_;
    j["state_hash"] = state_hash();
    return j;
}

} // namespace lplh
