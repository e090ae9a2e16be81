#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lplh {

enum class TerminalKind { none, victory, death, step_limit };

std::string to_string(TerminalKind k);

// What the environment returns for each command.
struct StepOutcome {
    std::string observation;
    int score = 0;
    int score_delta = 0;
    int moves = 0;
    bool terminal = false;
    TerminalKind terminal_kind = TerminalKind::none;
};

// The 10 movement verbs, in canonical order.
const std::vector<std::string>& directions();
bool is_direction(const std::string& word);
// Opposite direction, empty if none is defined.
std::string opposite_direction(const std::string& dir);

struct RoomDef {
    std::string id;
    std::string name;
    std::string description;
    std::map<std::string, std::string> exits; // direction -> room id
    std::set<std::string> signposted;         // exits described with the target name
    bool dark = false;
};

struct ObjectDef {
    std::string id;
    std::string name;
    std::string location; // room id
    bool portable = true;
    bool light_source = false;
    bool locked = false;
    bool openable = false;
    std::string key_id;   // object that unlocks this one
    std::string climb_to; // room id reached by "climb <name>"
};

struct TriggerDef {
    std::string id;
    std::string on; // "take" | "unlock" | "command"
    std::string object;
    std::string command;  // for on == "command"
    std::string location; // optional room id constraint
    int delta = 0;
    std::string message;
    bool once = true;
};

struct HazardDef {
    std::string room; // dark room where the grue lives
    int delta = 0;
    std::string message;
};

// Definition of a toy game world, loadable from a structured document.
struct WorldFixture {
    std::string id;
    int max_score = 0;
    std::vector<RoomDef> rooms;
    std::vector<ObjectDef> objects;
    std::vector<TriggerDef> triggers;
    std::vector<HazardDef> hazards;

    static WorldFixture from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    // Checks referential integrity (exits name defined rooms, etc.).
    void validate() const;
};

// The bundled "Miniature Manor" fixture. Max score 35.
WorldFixture miniature_manor();
// Scripted command sequence reaching score 35 and victory on the manor.
std::vector<std::string> manor_walkthrough();

// Environment contract of the game loop.
class Environment {
public:
    virtual ~Environment() = default;
    virtual StepOutcome reset(uint64_t seed) = 0;
    virtual StepOutcome step(const std::string& command) = 0;
    // Debug-only state snapshot; toy engine only. Never on the agent path.
    virtual nlohmann::json ground_truth() const;
    virtual std::string fixture_id() const { return {}; }
    virtual bool replayable() const { return false; }
};

class ToyEngine final : public Environment {
public:
    explicit ToyEngine(WorldFixture fixture);

    StepOutcome reset(uint64_t seed) override;
    StepOutcome step(const std::string& command) override;
    nlohmann::json ground_truth() const override;
    std::string fixture_id() const override { return fixture_.id; }
    bool replayable() const override { return true; }

    const WorldFixture& fixture() const { return fixture_; }

private:
    struct ObjState {
        std::string location; // room id or "inv"
        bool lit = false;
        bool locked = false;
        bool open = false;
    };

    const RoomDef& room(const std::string& id) const;
    const ObjectDef* find_object_def(const std::string& id) const;
    // Resolves a player-typed noun against objects at the given locations.
    const ObjectDef* resolve_noun(const std::string& noun,
                                  const std::vector<std::string>& scopes) const;
    bool has_light() const;
    std::string describe_room(const std::string& room_id) const;
    std::string fire_triggers(const std::string& on, const std::string& object_id,
                              const std::string& command, int& delta);
    StepOutcome make_outcome(std::string observation, int delta);
    uint64_t state_hash() const;

    WorldFixture fixture_;
    std::string location_;
    std::map<std::string, ObjState> objects_;
    std::set<std::string> fired_;
    int score_ = 0;
    int moves_ = 0;
    bool terminal_ = true; // must reset first
    TerminalKind terminal_kind_ = TerminalKind::none;
    bool dark_pending_ = false;
};

} // namespace lplh
