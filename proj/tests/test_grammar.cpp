#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "cfx/error.hpp"
#include "cfx/grammar.hpp"
#include "support.hpp"

using namespace cfx;

TEST_CASE("normalization lowercases and drops punctuation") {
    Sentence s = Sentence::from_text("  Go to the BLUE ball, then pick up a red key!  ");
    CHECK(s.text() == "go to the blue ball then pick up a red key");
    CHECK(Sentence::from_text("go-to the blue ball").tokens.size() == 5);
    CHECK_THROWS_AS(Sentence::from_text(" ,.! "), ParseError);
    CHECK_THROWS_AS(Sentence::from_text(""), ParseError);
}

TEST_CASE("in-grammar sentences parse") {
    // The first task used in the study.
    CHECK(parse(Sentence::from_text("go to the green ball")) == Program::go_to({Color::green, ObjectKind::ball}));
    CHECK(parse(Sentence::from_text("put a yellow box next to the grey ball")) ==
          Program::put_next({Color::yellow, ObjectKind::box}, {Color::grey, ObjectKind::ball}));
    CHECK(parse(Sentence::from_text("pick up the red key then go to a blue box")) ==
          Program::seq(Program::pick_up({Color::red, ObjectKind::key}), Program::go_to({Color::blue, ObjectKind::box})));
}

TEST_CASE("unknown words are reported before structure") {
    try {
        parse(Sentence::from_text("go to the top right"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.reason() == ParseError::Reason::unknown_token);
        CHECK(e.token() == "top");
        CHECK(e.position() == 3);
    }
    try {
        parse(Sentence::from_text("go to the blue circle"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.reason() == ParseError::Reason::unknown_token);
        CHECK(e.token() == "circle");
    }
}

TEST_CASE("structural errors carry the failing position") {
    auto reason_at = [](const char* text) {
        try {
            parse(Sentence::from_text(text));
        } catch (const ParseError& e) {
            return std::make_pair(e.reason(), e.position());
        }
        FAIL("expected ParseError for " << text);
        return std::make_pair(ParseError::Reason::structural, std::size_t{0});
    };
    CHECK(reason_at("go the blue ball") == std::make_pair(ParseError::Reason::structural, std::size_t{1}));
    CHECK(reason_at("go to blue ball") == std::make_pair(ParseError::Reason::structural, std::size_t{2}));
    CHECK(reason_at("go to the blue ball then") == std::make_pair(ParseError::Reason::structural, std::size_t{6}));
    CHECK(reason_at("go to the blue ball go") == std::make_pair(ParseError::Reason::structural, std::size_t{5}));
    CHECK(reason_at("go to the blue ball then go to the red key then go to the red key").first ==
          ParseError::Reason::structural);
}

TEST_CASE("parse inverts unparse over the whole bounded space") {
    auto sentences = enumerate_sentences(2);
    auto programs = enumerate_programs(2);
    REQUIRE(sentences.size() == programs.size());
    for (std::size_t i = 0; i < programs.size(); ++i) {
        REQUIRE(sentences[i] == unparse(programs[i]));
        REQUIRE(parse(sentences[i]) == programs[i]);
    }
}

TEST_CASE("either article parses to the same program") {
    auto programs = enumerate_programs(1);
    for (const auto& p : programs) {
        Sentence s = unparse(p);
        for (auto& t : s.tokens) {
            if (t == "the") t = "a";
        }
        REQUIRE(parse(s) == p);
    }
}

TEST_CASE("random token sequences outside the grammar are rejected") {
    std::vector<std::string> vocab = {"go",   "to",  "pick", "up",    "put",    "next", "the",  "a",
                                      "then", "blue", "red",  "green", "grey",  "ball", "box",  "key",
                                      "top",  "right", "circle", "please"};
    std::mt19937_64 rng(99);
    int rejected = 0;
    for (int i = 0; i < 20000; ++i) {
        std::size_t n = 1 + rng() % 14;
        Sentence s;
        for (std::size_t k = 0; k < n; ++k) s.tokens.push_back(vocab[rng() % vocab.size()]);
        try {
            Program p = parse(s);
            // Accidental in-grammar draws must be exact inverses.
            Sentence canon = unparse(p);
            REQUIRE(canon.tokens.size() == s.tokens.size());
        } catch (const ParseError&) {
            ++rejected;
        }
    }
    CHECK(rejected > 19000);
}

TEST_CASE("terminals and the published grammar agree") {
    for (const char* w : {"go", "to", "pick", "up", "put", "next", "the", "a", "then", "grey", "key"}) {
        CHECK(is_terminal(w));
    }
    CHECK_FALSE(is_terminal("gray"));
    CHECK_FALSE(is_terminal("circle"));
    std::ifstream in(test::fixture("grammar.bnf"));
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == grammar_bnf());
}

TEST_CASE("training corpus pairs are parse-consistent and seeded") {
    auto a = training_corpus(1000, 3);
    auto b = training_corpus(1000, 3);
    CHECK(a == b);
    CHECK(a != training_corpus(1000, 4));
    std::size_t two = 0;
    for (const auto& [s, p] : a) {
        REQUIRE(parse(s) == p);
        two += p.depth() == 2;
    }
    CHECK(two > 900);  // the depth-2 tier dominates a uniform draw
    for (const auto& [s, p] : training_corpus(200, 1, 1)) CHECK(p.depth() == 1);
}
