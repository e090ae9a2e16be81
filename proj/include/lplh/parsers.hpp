#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lplh {

// One command produced by the decision model, with its stated motivation.
struct ParsedCommand {
    std::string command;
    std::string reason;

    bool operator==(const ParsedCommand&) const = default;
};

// A <subject, relation, object> fact extracted from an observation.
struct Triple {
    std::string subject;
    std::string relation;
    std::string object;

    bool operator==(const Triple&) const = default;
};

// A command decomposed into a verb pattern ("&" per object slot) and its objects.
struct ActionSplit {
    std::string verb_template;
    std::vector<std::string> objects;

    int arity() const;
    // Re-instantiates the original command from the template and objects.
    std::string render() const;

    bool operator==(const ActionSplit&) const = default;
};

// Raw fields pulled out of an experience-summary response. Field extraction
// beyond the marked spans is best-effort; the body is kept verbatim.
struct ExperienceFields {
    std::vector<std::string> locations;
    std::vector<std::string> steps;
    std::vector<std::string> objects;
    std::vector<std::string> tags; // <= 4, room tag included as plain text
    std::string room_tag;
    std::string difficulty = "unknown";
    std::string body;

    bool operator==(const ExperienceFields&) const = default;
};

// --- parsers (throw MalformedResponse when the marker block is missing) ---

bool parse_validation(const std::string& response);
std::vector<Triple> parse_triples(const std::string& response,
                                  std::vector<std::string>* dropped = nullptr);
ActionSplit parse_action_split(const std::string& response);
ParsedCommand parse_agent_command(const std::string& response);
// Baseline format: bare command between |start| and |end|.
std::string parse_baseline_command(const std::string& response);
ExperienceFields parse_experience(const std::string& response);

// --- renderers (inverse direction, used by templates and round-trip tests) ---

std::string render_validation(bool valid);
std::string render_triples(const std::vector<Triple>& triples);
std::string render_action_split(const ActionSplit& split);
std::string render_agent_command(const ParsedCommand& cmd);
std::string render_experience(const ExperienceFields& fields);

// Extracts the content of the last |start| ... |end| block, if any.
std::optional<std::string> last_block(const std::string& response);

} // namespace lplh
