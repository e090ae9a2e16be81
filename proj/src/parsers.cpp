#include "lplh/parsers.hpp"

#include "lplh/errors.hpp"
#include "lplh/text.hpp"

#include <algorithm>

namespace lplh {

using text::trim;
using text::lower;
using text::words;

int ActionSplit::arity() const {
    return static_cast<int>(std::count(verb_template.begin(), verb_template.end(), '&'));
}

std::string ActionSplit::render() const {
    std::string out;
    size_t obj = 0;
    for (char c : verb_template) {
        if (c == '&' && obj < objects.size())
            out += objects[obj++];
        else
            out += c;
    }
    return out;
}

std::optional<std::string> last_block(const std::string& response) {
    const std::string open = "|start|", close = "|end|";
    std::optional<std::string> found;
    size_t pos = 0;
    while (true) {
        size_t s = response.find(open, pos);
        if (s == std::string::npos) break;
        size_t e = response.find(close, s + open.size());
        if (e == std::string::npos) break;
        found = response.substr(s + open.size(), e - s - open.size());
        pos = e + close.size();
    }
    return found;
}

namespace {

// All marker spans named `name`, accepting both "</name>" and a repeated
// "<name>" as the closing marker (the prompts mix the two styles).
std::vector<std::string> marker_spans(const std::string& s, const std::string& name) {
    const std::string open = "<" + name + ">", close = "</" + name + ">";
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
        size_t b = s.find(open, pos);
        if (b == std::string::npos) break;
        size_t content = b + open.size();
        size_t e1 = s.find(close, content);
        size_t e2 = s.find(open, content);
        size_t e = std::min(e1, e2);
        if (e == std::string::npos) break;
        out.push_back(trim(s.substr(content, e - content)));
        pos = e + (e == e1 ? close.size() : open.size());
    }
    return out;
}

std::optional<std::string> last_span(const std::string& s, const std::string& name) {
    auto spans = marker_spans(s, name);
    if (spans.empty()) return std::nullopt;
    return spans.back();
}

std::string strip_brackets(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']')
        s = trim(s.substr(1, s.size() - 2));
    return s;
}

} // namespace

bool parse_validation(const std::string& response) {
    auto span = last_span(response, "ais");
    if (!span) throw MalformedResponse("no <ais> block in validator response");
    std::string v = lower(trim(*span));
    if (v == "true") return true;
    if (v == "false") return false;
    throw MalformedResponse("unrecognized <ais> content: " + *span);
}

std::vector<Triple> parse_triples(const std::string& response,
                                  std::vector<std::string>* dropped) {
    auto block = last_block(response);
    if (!block) throw MalformedResponse("no |start| block in extractor response");
    std::string body = trim(*block);
    if (lower(body) == "none") return {};

    std::vector<Triple> out;
    size_t pos = 0;
    while (true) {
        size_t b = body.find('<', pos);
        if (b == std::string::npos) break;
        size_t e = body.find('>', b + 1);
        if (e == std::string::npos) break;
        pos = e + 1;
        std::string item = body.substr(b + 1, e - b - 1);
        size_t first = item.find(',');
        size_t last = item.rfind(',');
        if (first == std::string::npos || first == last) {
            if (dropped) dropped->push_back(item);
            continue;
        }
        Triple t{strip_brackets(item.substr(0, first)),
                 trim(item.substr(first + 1, last - first - 1)),
                 trim(item.substr(last + 1))};
        bool ok = !t.subject.empty() && !t.relation.empty() && !t.object.empty();
        if (ok && lower(t.relation) == "have" && words(t.object).size() > 3) ok = false;
        if (ok)
            out.push_back(std::move(t));
        else if (dropped)
            dropped->push_back(item);
    }
    if (out.empty() && body.find('<') == std::string::npos)
        throw MalformedResponse("extractor block is neither 'none' nor triples: " + body);
    return out;
}

ActionSplit parse_action_split(const std::string& response) {
    auto span = last_span(response, "act");
    if (!span) throw MalformedResponse("no <act> block in splitter response");
    std::string s = trim(*span);
    size_t b = s.find('<');
    size_t e = s.rfind('>');
    if (b == std::string::npos || e == std::string::npos || e <= b)
        throw MalformedResponse("no <verb; [objs]> pair inside <act>: " + s);
    std::string inner = s.substr(b + 1, e - b - 1);
    size_t semi = inner.find(';');
    if (semi == std::string::npos)
        throw MalformedResponse("missing ';' in action split: " + inner);
    ActionSplit split;
    split.verb_template = trim(inner.substr(0, semi));
    std::string rest = inner.substr(semi + 1);
    size_t lb = rest.find('[');
    size_t rb = rest.rfind(']');
    if (lb == std::string::npos || rb == std::string::npos || rb < lb)
        throw MalformedResponse("missing object list in action split: " + inner);
    for (auto& part : text::split(rest.substr(lb + 1, rb - lb - 1), ',')) {
        std::string obj = trim(part);
        if (!obj.empty()) split.objects.push_back(std::move(obj));
    }
    if (split.verb_template.empty())
        throw MalformedResponse("empty verb in action split");
    if (split.arity() != static_cast<int>(split.objects.size()))
        throw MalformedResponse("placeholder/object count mismatch: " + inner);
    return split;
}

ParsedCommand parse_agent_command(const std::string& response) {
    auto block = last_block(response);
    if (!block) throw MalformedResponse("no |start| block in actor response");
    auto com = last_span(*block, "com");
    if (!com || trim(*com).empty())
        throw MalformedResponse("no <com> command in actor response");
    ParsedCommand cmd;
    cmd.command = trim(*com);
    if (auto rea = last_span(*block, "rea")) cmd.reason = *rea;
    return cmd;
}

std::string parse_baseline_command(const std::string& response) {
    auto block = last_block(response);
    if (!block) throw MalformedResponse("no |start| block in baseline response");
    if (block->find("<com>") != std::string::npos)
        return parse_agent_command(response).command;
    // first non-empty line of the block is the command
    for (auto& line : text::split(*block, '\n')) {
        std::string t = trim(line);
        if (!t.empty()) return t;
    }
    throw MalformedResponse("empty baseline command block");
}

ExperienceFields parse_experience(const std::string& response) {
    auto block = last_block(response);
    if (!block) throw MalformedResponse("no |start| block in summarizer response");
    ExperienceFields f;
    f.body = trim(*block);
    f.locations = marker_spans(*block, "loc");
    f.steps = marker_spans(*block, "step");
    f.objects = marker_spans(*block, "obj");
    if (auto dif = last_span(*block, "dif"); dif && !dif->empty()) f.difficulty = *dif;

    for (auto& tagspan : marker_spans(*block, "tag")) {
        for (auto& part : text::split(tagspan, ',')) {
            if (f.tags.size() >= 4) break;
            std::string t = trim(part);
            if (t.empty()) continue;
            if (t.find("<room>") != std::string::npos) {
                if (auto room = last_span(t, "room")) {
                    f.room_tag = *room;
                    t = *room;
                }
            }
            f.tags.push_back(t);
        }
    }
    return f;
}

std::string render_validation(bool valid) {
    return valid ? "<ais> True </ais>" : "<ais> False </ais>";
}

std::string render_triples(const std::vector<Triple>& triples) {
    if (triples.empty()) return "|start| none |end|";
    std::vector<std::string> items;
    items.reserve(triples.size());
    for (const auto& t : triples)
        items.push_back("<" + t.subject + ", " + t.relation + ", " + t.object + ">");
    return "|start| " + text::join(items, ", ") + " |end|";
}

std::string render_action_split(const ActionSplit& split) {
    return "<act> <" + split.verb_template + "; [" + text::join(split.objects, ", ") +
           "]> </act>";
}

std::string render_agent_command(const ParsedCommand& cmd) {
    return "|start| <com>" + cmd.command + "</com> <rea>" + cmd.reason + "</rea> |end|";
}

std::string render_experience(const ExperienceFields& f) {
    std::string out = "|start|\n1. location: ";
    for (const auto& loc : f.locations) out += "<loc>" + loc + "<loc> ";
    out += "\n2. puzzle_status: ";
    for (const auto& s : f.steps) out += "player did <step>" + s + "<step> ";
    out += "\n3. scoring: see steps above.";
    out += "\n4. important_experience: ";
    for (const auto& o : f.objects) out += "<obj>" + o + "<obj> ";
    out += "\n<tag> ";
    std::vector<std::string> rendered;
    for (const auto& t : f.tags) {
        if (t == f.room_tag && !f.room_tag.empty())
            rendered.push_back("<room>" + t + "</room>");
        else
            rendered.push_back(t);
    }
    out += text::join(rendered, ", ");
    out += " </tag>\n<dif> " + f.difficulty + " </dif>\n|end|";
    return out;
}

} // namespace lplh
