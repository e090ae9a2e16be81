#pragma once

#include "lplh/parsers.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace lplh {

// The agent's dynamic world model: rooms, exits, objects, requirements.
// Confirmed facts live in `exits`/`objects`; tentative ones in the may_* sets.
class KnowledgeGraph {
public:
    struct Room {
        std::set<std::string> objects;           // have
        std::set<std::string> tentative_objects; // may_have
        std::map<std::string, std::string> exits; // direction -> room
        std::set<std::string> tentative_exits;    // may_direction
    };

    struct Containment {
        std::string relation; // "in" or "on"
        std::string container;
        bool operator==(const Containment&) const = default;
    };

    // Folds a batch of extracted triples into the graph. Noisy triples are
    // skipped and counted, never fatal. Clears any pending traversal at the
    // end of the batch: a move is only confirmed by a <You, in, R> observed
    // on the same turn.
    void ingest_triples(const std::vector<Triple>& triples, int step);

    // Folds the previous action into the graph once its validity is known.
    void apply_action(const ActionSplit& split, bool valid, int step);

    // Deterministic JSON context block for the decision prompt.
    std::string serialize_context() const;

    // (rooms visited, objects known)
    std::pair<int, int> stats() const;

    // New episode: player state resets, room/exit knowledge persists.
    void reset_player();

    nlohmann::json export_snapshot() const;
    static KnowledgeGraph import_snapshot(const nlohmann::json& j);

    const std::string& player_location() const { return player_location_; }
    const std::set<std::string>& inventory() const { return inventory_; }
    const std::map<std::string, Room>& rooms() const { return rooms_; }
    const std::set<std::string>& visited() const { return visited_; }

    // Confirmed objects at the player's location, including contained ones.
    std::vector<std::string> visible_objects() const;

    // Throws Error if a structural invariant is violated.
    void check_invariants() const;

    int dropped_triples() const { return dropped_; }
    int last_step() const { return last_step_; }

private:
    // Removes `object` from every holder (rooms, inventory, containment).
    void detach_object(const std::string& object);
    // Known object key matching `noun` by name or head noun, if any.
    std::optional<std::string> find_object(const std::string& noun) const;
    void ingest_one(const Triple& t, int step);

    std::map<std::string, Room> rooms_;
    std::set<std::string> visited_;
    std::string player_location_;
    std::set<std::string> inventory_;
    std::map<std::string, Containment> containment_;
    std::map<std::string, std::set<std::string>> needs_;
    std::map<std::string, int> provenance_;
    std::optional<std::pair<std::string, std::string>> pending_move_; // (from, dir)
    int dropped_ = 0;
    int last_step_ = 0;
};

} // namespace lplh
