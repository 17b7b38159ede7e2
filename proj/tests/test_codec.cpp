#include <doctest.h>

#include "cfx/codec.hpp"
#include "support.hpp"

using namespace cfx;

TEST_CASE("state documents use the canonical field order") {
    GridState s = test::example_world();
    Json j = to_json(s);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"width", "height", "agent", "carrying", "objects"});
    CHECK(j["agent"] == Json::parse(R"({"col": 2, "row": 5, "dir": "east"})"));
    CHECK(j["objects"][0].dump() == R"({"id":1,"kind":"ball","color":"blue","col":5,"row":2})");
    CHECK(state_from_json(j) == s);
}

TEST_CASE("carried objects round-trip with and without an id") {
    GridState s = test::example_world();
    s.agent = {{4, 2}, Direction::east};
    GridState held = step(s, Action::pickup);
    Json j = to_json(held);
    CHECK(j["carrying"]["kind"] == "ball");
    CHECK(state_from_json(j) == held);

    j["carrying"].erase("id");
    GridState fresh = state_from_json(j);
    REQUIRE(fresh.carrying.has_value());
    CHECK(fresh.carrying->id == 5);  // one past the largest id on the grid
}

TEST_CASE("object order in the document does not matter") {
    Json j = to_json(test::example_world());
    std::reverse(j["objects"].begin(), j["objects"].end());
    CHECK(state_from_json(j) == test::example_world());
}

TEST_CASE("malformed state documents are rejected") {
    Json good = to_json(test::example_world());
    Json missing = good;
    missing.erase("width");
    CHECK_THROWS_AS(state_from_json(missing), CodecError);
    Json bad_color = good;
    bad_color["objects"][0]["color"] = "pink";
    CHECK_THROWS_AS(state_from_json(bad_color), CodecError);
    Json bad_dir = good;
    bad_dir["agent"]["dir"] = "up";
    CHECK_THROWS_AS(state_from_json(bad_dir), CodecError);
    Json wrong_type = good;
    wrong_type["height"] = "8";
    CHECK_THROWS_AS(state_from_json(wrong_type), CodecError);
    Json overlapping = good;
    overlapping["objects"][1]["col"] = 5;
    overlapping["objects"][1]["row"] = 2;
    CHECK_THROWS_AS(state_from_json(overlapping), InvalidState);
}

TEST_CASE("action lists name the first bad entry") {
    CHECK(actions_from_json(Json::parse(R"(["forward", "pickup"])")) ==
          std::vector<Action>{Action::forward, Action::pickup});
    try {
        actions_from_json(Json::parse(R"(["forward", "jump", "left"])"));
        FAIL("expected InvalidTrajectory");
    } catch (const InvalidTrajectory& e) {
        CHECK(e.index() == 1);
    }
    CHECK_THROWS_AS(actions_from_json(Json::parse(R"({"a": 1})")), CodecError);
}

TEST_CASE("trajectories round-trip") {
    Trajectory t = test::example_demo();
    CHECK(trajectory_from_json(to_json(t)) == t);
}

TEST_CASE("explanation results serialize every field") {
    Lexicon lex = Lexicon::load(test::fixture("lexicon.txt"));
    auto r = explain_pruned({Sentence::from_text("go to the blue circle"), test::example_demo(), 2}, lex);
    Json j = to_json(r);
    CHECK(j["explanation"] == "go to the blue ball");
    CHECK(j["program"] == "goto(blue,ball)");
    CHECK(j["similarity"].is_number());
    CHECK(j["perplexity"].is_null());
    CHECK(j["method"] == "full");
    CHECK(j["candidate_count"] == r.candidates.size());
    CHECK(j["candidates"].size() == r.candidates.size());
    CHECK(to_json(r, 1)["candidates"].size() == 1);
    CHECK(to_json(r, 1)["candidate_count"] == r.candidates.size());
}

TEST_CASE("parse errors serialize their kind and token") {
    try {
        parse(Sentence::from_text("go to the top right"));
    } catch (const ParseError& e) {
        Json j = to_json(e);
        CHECK(j["kind"] == "unknown_token");
        CHECK(j["token"] == "top");
        CHECK(j["position"] == 3);
    }
    try {
        parse(Sentence::from_text("go to"));
    } catch (const ParseError& e) {
        Json j = to_json(e);
        CHECK(j["kind"] == "structural");
        CHECK_FALSE(j.contains("token"));
    }
}

TEST_CASE("programs are accepted in either text form") {
    Program p = Program::go_to({Color::red, ObjectKind::key});
    CHECK(program_from_text("goto(red,key)") == p);
    CHECK(program_from_text("Go to the red key.") == p);
    CHECK_THROWS_AS(program_from_text("go to the red kiwi"), ParseError);
}

TEST_CASE("missing files raise a domain error") {
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), Error);
}
