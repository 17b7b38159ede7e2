#include "cfx/codec.hpp"

#include <algorithm>
#include <fstream>

#include "cfx/grammar.hpp"

namespace cfx {

namespace {

const Json& field(const Json& j, const char* name) {
    if (!j.is_object()) throw CodecError(std::string("expected an object holding \"") + name + "\"");
    auto it = j.find(name);
    if (it == j.end()) throw CodecError(std::string("missing field \"") + name + "\"");
    return *it;
}

int int_field(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_number_integer()) throw CodecError(std::string("field \"") + name + "\" must be an integer");
    return v.get<int>();
}

std::string string_field(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_string()) throw CodecError(std::string("field \"") + name + "\" must be a string");
    return v.get<std::string>();
}

template <typename Enum>
Enum enum_field(const Json& j, const char* name, std::optional<Enum> (*lookup)(std::string_view)) {
    std::string s = string_field(j, name);
    auto e = lookup(s);
    if (!e) throw CodecError(std::string("unknown ") + name + " \"" + s + "\"");
    return *e;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

} // namespace

Json to_json(const GridState& s) {
    Json j;
    j["width"] = s.width;
    j["height"] = s.height;
    j["agent"] = {{"col", s.agent.position.col},
                  {"row", s.agent.position.row},
                  {"dir", std::string(to_string(s.agent.direction))}};
    if (s.carrying) {
        j["carrying"] = {{"kind", std::string(to_string(s.carrying->kind))},
                         {"color", std::string(to_string(s.carrying->color))},
                         {"id", s.carrying->id}};
    } else {
        j["carrying"] = nullptr;
    }
    Json objects = Json::array();
    for (const auto& o : s.objects) {
        objects.push_back({{"id", o.id},
                           {"kind", std::string(to_string(o.kind))},
                           {"color", std::string(to_string(o.color))},
                           {"col", o.position.col},
                           {"row", o.position.row}});
    }
    j["objects"] = std::move(objects);
    return j;
}

GridState state_from_json(const Json& j) {
    GridState s;
    s.width = int_field(j, "width");
    s.height = int_field(j, "height");
    const Json& agent = field(j, "agent");
    s.agent.position = {int_field(agent, "col"), int_field(agent, "row")};
    s.agent.direction = enum_field<Direction>(agent, "dir", direction_from_string);

    const Json& objects = field(j, "objects");
    if (!objects.is_array()) throw CodecError("field \"objects\" must be an array");
    int max_id = 0;
    for (const auto& o : objects) {
        WorldObject w;
        w.id = int_field(o, "id");
        w.kind = enum_field<ObjectKind>(o, "kind", kind_from_string);
        w.color = enum_field<Color>(o, "color", color_from_string);
        w.position = {int_field(o, "col"), int_field(o, "row")};
        max_id = std::max(max_id, w.id);
        s.objects.push_back(w);
    }
    if (j.contains("carrying") && !j["carrying"].is_null()) {
        const Json& c = j["carrying"];
        WorldObject w;
        w.kind = enum_field<ObjectKind>(c, "kind", kind_from_string);
        w.color = enum_field<Color>(c, "color", color_from_string);
        w.id = c.contains("id") ? int_field(c, "id") : max_id + 1;
        s.carrying = w;
    }
    s = normalized(std::move(s));
    validate(s);
    return s;
}

Json to_json(const std::vector<Action>& actions) {
    Json arr = Json::array();
    for (Action a : actions) arr.push_back(std::string(to_string(a)));
    return arr;
}

std::vector<Action> actions_from_json(const Json& j) {
    if (!j.is_array()) throw CodecError("actions must be an array of action names");
    std::vector<Action> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::optional<Action> a;
        if (j[i].is_string()) a = action_from_string(j[i].get<std::string>());
        if (!a) throw InvalidTrajectory(i, "unknown action " + j[i].dump());
        out.push_back(*a);
    }
    return out;
}

Json to_json(const Trajectory& t) {
    Json j;
    j["initial"] = to_json(t.initial);
    j["actions"] = to_json(t.actions);
    return j;
}

Trajectory trajectory_from_json(const Json& j) {
    return {state_from_json(field(j, "initial")), actions_from_json(field(j, "actions"))};
}

Json to_json(const Candidate& c) {
    Json j;
    j["sentence"] = c.sentence.text();
    j["program"] = to_prefix(c.program);
    j["similarity"] = optional_number(c.similarity);
    j["perplexity"] = optional_number(c.perplexity);
    return j;
}

Json to_json(const ExplanationResult& r, std::optional<std::size_t> max_candidates) {
    Json j;
    j["explanation"] = r.explanation.text();
    j["program"] = to_prefix(r.program);
    j["similarity"] = optional_number(r.similarity);
    j["perplexity"] = optional_number(r.perplexity);
    j["method"] = std::string(to_string(r.method));
    Json cands = Json::array();
    std::size_t limit = max_candidates ? std::min(*max_candidates, r.candidates.size()) : r.candidates.size();
    for (std::size_t i = 0; i < limit; ++i) cands.push_back(to_json(r.candidates[i]));
    j["candidate_count"] = r.candidates.size();
    j["candidates"] = std::move(cands);
    return j;
}

Json to_json(const ParseError& e) {
    Json j;
    if (e.reason() == ParseError::Reason::unknown_token) {
        j["kind"] = "unknown_token";
        j["token"] = e.token();
    } else {
        j["kind"] = "structural";
    }
    j["position"] = e.position();
    j["message"] = e.what();
    return j;
}

Program program_from_text(const std::string& text) {
    if (text.find('(') != std::string::npos) return from_prefix(text);
    return parse(Sentence::from_text(text));
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(path + " is not valid JSON");
    return j;
}

} // namespace cfx
