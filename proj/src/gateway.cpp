#include "lplh/gateway.hpp"

#include "lplh/env.hpp"
#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace lplh {

using nlohmann::json;
using text::lower;
using text::trim;
using text::words;

std::string to_string(Role role) {
    switch (role) {
    case Role::actor: return "actor";
    case Role::summarizer: return "summarizer";
    case Role::validator: return "validator";
    case Role::extractor: return "extractor";
    case Role::splitter: return "splitter";
    }
    return "actor";
}

Role role_from_string(const std::string& name) {
    if (name == "actor") return Role::actor;
    if (name == "summarizer") return Role::summarizer;
    if (name == "validator") return Role::validator;
    if (name == "extractor") return Role::extractor;
    if (name == "splitter") return Role::splitter;
    throw Error("unknown model role: " + name);
}

RoleConfig default_role_config(Role role) {
    RoleConfig cfg;
    cfg.template_id = to_string(role) + ".v1";
    switch (role) {
    case Role::actor:
    case Role::summarizer: cfg.temperature = 0.6; break;
    case Role::validator:
    case Role::extractor:
    case Role::splitter: cfg.temperature = 0.1; break;
    }
    return cfg;
}

json CallRecord::to_json() const {
    return json{{"role", lplh::to_string(role)},
                {"fingerprint", fingerprint},
                {"latency_ms", latency_ms},
                {"prompt_tokens", prompt_tokens},
                {"completion_tokens", completion_tokens},
                {"ok", ok}};
}

uint64_t Gateway::fingerprint(const std::string& prompt) {
    return text::fnv1a(prompt);
}

std::string Gateway::complete(Role role, const std::string& prompt) {
    CallRecord record;
    record.role = role;
    record.fingerprint = fingerprint(prompt);
    auto start = std::chrono::steady_clock::now();
    std::string response;
    try {
        response = do_complete(role, prompt, record);
    } catch (...) {
        record.ok = false;
        record.latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        log_.push_back(record);
        if (!log_sink_.empty())
            std::ofstream(log_sink_, std::ios::app) << record.to_json().dump() << "\n";
        throw;
    }
    record.latency_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    log_.push_back(record);
    if (!log_sink_.empty())
        std::ofstream(log_sink_, std::ios::app) << record.to_json().dump() << "\n";
    return response;
}

// --- scripted oracle ---

void ScriptedGateway::add_fingerprint(Role role, uint64_t fp, std::string response) {
    by_fingerprint_[{static_cast<int>(role), fp}] = std::move(response);
}

void ScriptedGateway::add_contains(Role role, std::string needle, std::string response) {
    by_contains_.emplace_back(static_cast<int>(role), std::move(needle),
                              std::move(response));
}

void ScriptedGateway::push_response(Role role, std::string response) {
    queues_[static_cast<int>(role)].push_back(std::move(response));
}

size_t ScriptedGateway::queue_remaining(Role role) const {
    auto it = queues_.find(static_cast<int>(role));
    return it == queues_.end() ? 0 : it->second.size();
}

std::string ScriptedGateway::do_complete(Role role, const std::string& prompt,
                                         CallRecord& /*record*/) {
    auto fp_it = by_fingerprint_.find({static_cast<int>(role), fingerprint(prompt)});
    if (fp_it != by_fingerprint_.end()) return fp_it->second;
    for (const auto& [r, needle, response] : by_contains_)
        if (r == static_cast<int>(role) && prompt.find(needle) != std::string::npos)
            return response;
    auto q_it = queues_.find(static_cast<int>(role));
    if (q_it != queues_.end() && !q_it->second.empty()) {
        std::string out = q_it->second.front();
        q_it->second.pop_front();
        return out;
    }
    if (strict_)
        throw ScriptMiss("no scripted response for role " + lplh::to_string(role));
    return {};
}

ScriptedGateway ScriptedGateway::from_json(const json& j) {
    ScriptedGateway gw;
    gw.strict_ = j.value("strict", true);
    if (j.contains("responses"))
        for (const auto& r : j.at("responses"))
            gw.add_contains(role_from_string(r.at("role").get<std::string>()),
                            r.at("prompt_contains").get<std::string>(),
                            r.at("response").get<std::string>());
    if (j.contains("queues"))
        for (auto& [role, list] : j.at("queues").items())
            for (const auto& resp : list)
                gw.push_response(role_from_string(role), resp.get<std::string>());
    if (j.contains("fingerprints"))
        for (const auto& f : j.at("fingerprints"))
            gw.add_fingerprint(role_from_string(f.at("role").get<std::string>()),
                               f.at("fingerprint").get<uint64_t>(),
                               f.at("response").get<std::string>());
    return gw;
}

ScriptedGateway ScriptedGateway::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open script file: " + path);
    json j;
    in >> j;
    return from_json(j);
}

// --- remote client ---

RemoteConfig RemoteConfig::from_json(const json& j) {
    RemoteConfig cfg;
    cfg.base_url = j.at("base_url").get<std::string>();
    cfg.api_key_env = j.value("api_key_env", "");
    cfg.timeout_s = j.value("timeout_s", 120);
    cfg.attempts = j.value("attempts", 3);
    cfg.backoff_ms = j.value("backoff_ms", 500);
    cfg.max_calls = j.value("max_calls", 0L);
    cfg.max_tokens = j.value("max_tokens", 0L);
    for (Role role : {Role::actor, Role::summarizer, Role::validator, Role::extractor,
                      Role::splitter}) {
        RoleConfig rc = default_role_config(role);
        rc.model = j.value("model", "");
        cfg.roles[role] = rc;
    }
    if (j.contains("roles"))
        for (auto& [name, rj] : j.at("roles").items()) {
            Role role = role_from_string(name);
            RoleConfig& rc = cfg.roles[role];
            rc.model = rj.value("model", rc.model);
            rc.temperature = rj.value("temperature", rc.temperature);
            rc.max_retries = rj.value("max_retries", rc.max_retries);
        }
    return cfg;
}

RemoteGateway::RemoteGateway(RemoteConfig config) : config_(std::move(config)) {
    std::string url = config_.base_url;
    std::string scheme = "http://";
    if (url.starts_with("http://"))
        url = url.substr(7);
    else if (url.starts_with("https://"))
        throw Error("https endpoints are not supported by this build");
    size_t slash = url.find('/');
    std::string hostport = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/v1/chat/completions" : url.substr(slash);
    size_t colon = hostport.find(':');
    host_ = colon == std::string::npos ? hostport : hostport.substr(0, colon);
    port_ = colon == std::string::npos ? 80 : std::stoi(hostport.substr(colon + 1));
}

std::string RemoteGateway::do_complete(Role role, const std::string& prompt,
                                       CallRecord& record) {
    if (config_.max_calls > 0 && calls_ >= config_.max_calls)
        throw BudgetExceeded("per-run call budget exhausted");
    if (config_.max_tokens > 0 && tokens_ >= config_.max_tokens)
        throw BudgetExceeded("per-run token budget exhausted");

    RoleConfig rc = default_role_config(role);
    if (auto it = config_.roles.find(role); it != config_.roles.end()) rc = it->second;
    json body{{"model", rc.model},
              {"temperature", rc.temperature},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};

    httplib::Client client(host_, port_);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_connection_timeout(10, 0);
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    int backoff = config_.backoff_ms;
    std::string last_error;
    for (int attempt = 0; attempt < config_.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error";
            continue;
        }
        if (res->status >= 500) {
            last_error = "server returned " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw ModelUnavailable("endpoint rejected request: " +
                                   std::to_string(res->status));
        try {
            json j = json::parse(res->body);
            ++calls_;
            if (j.contains("usage")) {
                record.prompt_tokens = j["usage"].value("prompt_tokens", 0);
                record.completion_tokens = j["usage"].value("completion_tokens", 0);
                tokens_ += record.prompt_tokens + record.completion_tokens;
            }
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            last_error = std::string("bad response payload: ") + e.what();
        }
    }
    throw ModelUnavailable("model endpoint failed after " +
                           std::to_string(config_.attempts) + " attempts: " + last_error);
}

// --- rule-based fm stand-ins ---

bool rule_validate(const std::string& prev_action, const std::string& observation,
                   const std::string& prev_observation) {
    static const std::vector<std::string> rejections = {
        "you can't", "you cannot", "that's not a verb", "i don't understand",
        "nothing happens"};
    std::string obs = lower(observation);
    for (const auto& pat : rejections)
        if (obs.find(pat) != std::string::npos) return false;
    // An unchanged observation means the action had no effect — except for
    // "look", which legitimately repeats the room description.
    std::string act = lower(trim(prev_action));
    bool is_look = act == "look" || act == "l";
    if (!is_look && !prev_observation.empty() &&
        trim(observation) == trim(prev_observation))
        return false;
    return true;
}

namespace {

bool blacklisted_first_word(const std::string& word) {
    static const std::vector<std::string> blocked = {"you", "it",   "the",  "there",
                                                     "a",   "an",   "oh",   "your",
                                                     "this", "that", "what", "welcome"};
    std::string w = lower(word);
    // tolerate contractions like "you're"
    size_t apos = w.find('\'');
    if (apos != std::string::npos) w = w.substr(0, apos);
    return std::find(blocked.begin(), blocked.end(), w) != blocked.end();
}

// Room-name heuristic: short, capitalized, no terminal punctuation.
bool looks_like_room_name(const std::string& candidate) {
    std::string c = trim(candidate);
    if (c.empty()) return false;
    char back = c.back();
    if (back == '.' || back == ':' || back == '!' || back == '?' || back == ',')
        return false;
    auto ws = words(c);
    if (ws.empty() || ws.size() > 5) return false;
    if (blacklisted_first_word(ws.front())) return false;
    for (const auto& w : ws) {
        for (char ch : w) {
            if (ch >= 'a' && ch <= 'z') return false; // first alpha must be uppercase
            if ((ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9')) break;
        }
    }
    return true;
}

std::string clip_object_name(const std::string& name) {
    auto ws = words(name);
    if (ws.size() <= 3) return name;
    std::vector<std::string> tail(ws.end() - 3, ws.end());
    return text::join(tail, " ");
}

std::string strip_trailing_period(std::string s) {
    s = trim(s);
    while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.pop_back();
    return trim(s);
}

} // namespace

std::vector<Triple> rule_extract(const std::string& /*prev_action*/,
                                 const std::string& observation) {
    std::vector<std::string> lines;
    for (auto& raw : text::split(observation, '\n')) {
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[' || line.front() == '*') continue; // score/status lines
        lines.push_back(line);
    }
    if (lines.empty()) return {};
    std::string lowered = lower(observation);
    if (lowered.find("you can't") != std::string::npos ||
        lowered.find("you cannot") != std::string::npos)
        return {};

    std::vector<Triple> out;
    std::string location;

    // location from the first line, or its first sentence when followed by more
    std::string first = lines.front();
    if (looks_like_room_name(first)) {
        location = first;
        lines.erase(lines.begin());
    } else {
        size_t dot = first.find('.');
        if (dot != std::string::npos && dot + 1 < first.size()) {
            std::string sentence = trim(first.substr(0, dot));
            std::string rest = trim(first.substr(dot + 1));
            if (!rest.empty() && looks_like_room_name(sentence)) {
                location = sentence;
                lines.front() = rest;
            }
        }
    }
    if (!location.empty()) out.push_back({"You", "in", location});
    const std::string loc_subject = location.empty() ? "[Location]" : location;

    for (const auto& line : lines) {
        // "There is a X here."
        if (line.starts_with("There is ") && line.ends_with(" here.")) {
            std::string obj =
                text::strip_article(line.substr(9, line.size() - 9 - 6));
            if (!obj.empty()) out.push_back({loc_subject, "have", clip_object_name(obj)});
            continue;
        }
        // "To the <dir> is the <Room>."
        if (line.starts_with("To the ")) {
            std::string rest = line.substr(7);
            size_t sp = rest.find(' ');
            if (sp != std::string::npos) {
                std::string dir = rest.substr(0, sp);
                std::string tail = trim(rest.substr(sp));
                if (is_direction(dir) && tail.starts_with("is the ")) {
                    out.push_back({loc_subject, dir,
                                   strip_trailing_period(tail.substr(7))});
                    continue;
                }
            }
        }
        // "You can go a, b and c from here."
        if (line.starts_with("You can go ") && line.ends_with(" from here.")) {
            std::string middle = line.substr(11, line.size() - 11 - 11);
            std::string normalized;
            for (size_t i = 0; i < middle.size();) {
                if (middle.compare(i, 5, " and ") == 0) {
                    normalized += ", ";
                    i += 5;
                } else {
                    normalized += middle[i++];
                }
            }
            for (auto& part : text::split(normalized, ',')) {
                std::string dir = trim(part);
                if (is_direction(dir)) out.push_back({loc_subject, dir, "to " + dir});
            }
            continue;
        }
        // "A X is on/in the Y."
        {
            std::string body = line;
            for (const char* rel : {" is on ", " is in "}) {
                size_t pos = body.find(rel);
                if (pos == std::string::npos) continue;
                std::string x = text::strip_article(body.substr(0, pos));
                std::string relation = std::string(rel).find(" on ") != std::string::npos
                                           ? "on"
                                           : "in";
                std::string y = text::strip_article(
                    strip_trailing_period(body.substr(pos + std::strlen(rel))));
                if (!x.empty() && !y.empty()) {
                    out.push_back({loc_subject, "have", clip_object_name(x)});
                    out.push_back({loc_subject, "have", clip_object_name(y)});
                    out.push_back({clip_object_name(x), relation, clip_object_name(y)});
                }
                break;
            }
        }
        // requirements: "The X is locked; you will need a Y." and friends
        size_t need_pos = lower(line).find("need ");
        if (need_pos != std::string::npos &&
            (need_pos == 0 || line[need_pos - 1] == ' ')) {
            std::string subject = loc_subject;
            size_t locked = line.find(" is locked");
            if (line.starts_with("The ") && locked != std::string::npos)
                subject = clip_object_name(line.substr(4, locked - 4));
            std::string tail =
                text::strip_article(strip_trailing_period(line.substr(need_pos + 5)));
            if (!tail.empty()) out.push_back({subject, "need", tail});
        }
    }
    return out;
}

ActionSplit rule_split(const std::string& action) {
    std::string cmd = trim(action);
    auto tokens = words(lower(cmd));
    if (tokens.empty()) return {"", {}};

    if (tokens.size() == 1) return {tokens[0], {}};
    if (tokens[1] == "all") return {text::join(tokens, " "), {}};

    static const std::vector<std::pair<std::string, std::string>> phrasal = {
        {"turn", "on"},  {"turn", "off"},  {"pick", "up"},    {"put", "down"},
        {"switch", "on"}, {"switch", "off"}, {"go", "around"}, {"drop", "down"},
        {"climb", "up"}, {"climb", "down"}};
    static const std::vector<std::string> prepositions = {
        "in", "on", "at", "with", "to", "into", "onto", "under", "over", "from",
        "about"};
    auto is_prep = [&](const std::string& w) {
        return std::find(prepositions.begin(), prepositions.end(), w) !=
               prepositions.end();
    };
    auto is_article = [](const std::string& w) {
        return w == "a" || w == "an" || w == "the";
    };

    size_t i = 1;
    std::string verb = tokens[0];
    for (const auto& [head, particle] : phrasal)
        if (tokens[0] == head && tokens[1] == particle) {
            verb += " " + particle;
            i = 2;
            break;
        }
    if (i >= tokens.size()) return {verb, {}};

    std::string pattern = verb;
    std::vector<std::string> objects;
    std::vector<std::string> group;
    auto flush_group = [&]() {
        if (group.empty()) return;
        objects.push_back(text::join(group, " "));
        pattern += " &";
        group.clear();
    };
    for (; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        if (is_article(tok)) continue;
        if (is_prep(tok) && !group.empty()) {
            flush_group();
            pattern += " " + tok;
        } else {
            group.push_back(tok);
        }
    }
    flush_group();
    if (objects.empty()) return {text::join(words(lower(cmd)), " "), {}};
    return {pattern, objects};
}

} // namespace lplh
