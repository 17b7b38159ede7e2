// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "cfx/explain.hpp"
#include "cfx/service.hpp"
#include "cfx/verify.hpp"
#include "support.hpp"

using namespace cfx;

namespace {

constexpr std::uint64_t kSeed = 20221207;

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failures;
    std::cout << (o.passed ? "PASS " : "FAIL ") << name << ": " << o.detail << " (" << std::fixed
              << std::setprecision(2) << secs << " s)" << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_result(const ExplanationResult& a, const ExplanationResult& b) {
    if (!(a.explanation == b.explanation) || !(a.program == b.program)) return false;
    if (!a.similarity || !b.similarity || !bit_equal(*a.similarity, *b.similarity)) return false;
    if (a.candidates.size() != b.candidates.size()) return false;
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
        const auto& x = a.candidates[i];
        const auto& y = b.candidates[i];
        if (!(x.sentence == y.sentence) || !(x.program == y.program) || !bit_equal(*x.similarity, *y.similarity)) {
            return false;
        }
    }
    return true;
}

struct EquivalenceCase {
    verify::Scenario scenario;
    ExplanationResult pruned;
};

} // namespace

int main() {
    const Lexicon lex = Lexicon::load(test::fixture("lexicon.txt"));
    const FluencyModel fluency_model = FluencyModel::load(test::fixture("fluency_corpus.txt"));
    std::vector<EquivalenceCase> equivalence_cases;

    criterion("blue-ball example", [&] {
        auto start = std::chrono::steady_clock::now();
        Trajectory demo = test::example_demo();
        std::ostringstream detail;
        bool ok = true;
        for (const char* u : {"go to the blue circle", "go to the top right"}) {
            ExplanationRequest req{Sentence::from_text(u), demo, 2};
            std::string naive = explain_naive(req, lex).explanation.text();
            std::string pruned = explain_pruned(req, lex).explanation.text();
            ok = ok && naive == "go to the blue ball" && pruned == "go to the blue ball";
            detail << "\"" << u << "\" -> naive \"" << naive << "\", pruned \"" << pruned << "\"; ";
        }
        double secs = seconds_since(start);
        detail << "runtime " << std::setprecision(3) << secs << " s (limit 5)";
        return Outcome{ok && secs < 5.0, detail.str()};
    });

    criterion("naive/pruned equivalence", [&] {
        const int triples = 25;
        std::mt19937_64 rng(kSeed);
        for (int i = 0; i < triples; ++i) {
            verify::Scenario sc = verify::random_scenario(rng);
            ExplanationRequest req{sc.utterance, sc.demo, 2};
            auto naive = explain_naive(req, lex);
            auto pruned = explain_pruned(req, lex);
            if (!same_result(naive, pruned)) {
                return Outcome{false, "depth 2 triple " + std::to_string(i) + " differs for \"" + sc.utterance.text() +
                                          "\""};
            }
            equivalence_cases.push_back({std::move(sc), std::move(pruned)});
        }
        auto start = std::chrono::steady_clock::now();
        std::mt19937_64 rng1(kSeed + 1);
        for (int i = 0; i < triples; ++i) {
            verify::Scenario sc = verify::random_scenario(rng1);
            ExplanationRequest req{sc.utterance, sc.demo, 1};
            if (!same_result(explain_naive(req, lex), explain_pruned(req, lex))) {
                return Outcome{false, "depth 1 triple " + std::to_string(i) + " differs"};
            }
        }
        double depth1 = seconds_since(start);
        std::ostringstream d;
        d << triples << " depth-2 triples bit-identical; depth-1 variant " << triples << " triples in "
          << std::setprecision(3) << depth1 << " s (limit 10)";
        return Outcome{depth1 < 10.0, d.str()};
    });

    criterion("consistent-set oracle", [&] {
        auto oracle = verify::check_consistent_set_oracle(10, 2, kSeed);
        auto sound = verify::check_executor_soundness(verify::soundness_world());
        return Outcome{oracle.passed && sound.passed, oracle.detail + "; " + sound.detail};
    });

    criterion("enumeration counts", [&] {
        std::size_t d1 = enumerate_programs(1).size();
        std::size_t d2 = enumerate_programs(2).size();
        std::size_t s1 = enumerate_sentences(1).size();
        std::size_t s2 = enumerate_sentences(2).size();
        std::ostringstream d;
        d << "depth 1: " << d1 << " programs / " << s1 << " sentences; depth 2: " << d2 << " / " << s2;
        return Outcome{d1 == 360 && s1 == 360 && d2 == 129960 && s2 == 129960, d.str()};
    });

    criterion("parser bijection", [&] {
        auto programs = enumerate_programs(2);
        auto sentences = enumerate_sentences(2);
        std::unordered_set<std::string> language;
        for (std::size_t i = 0; i < programs.size(); ++i) {
            if (!(unparse(programs[i]) == sentences[i]) || !(parse(sentences[i]) == programs[i])) {
                return Outcome{false, "round trip fails for \"" + sentences[i].text() + "\""};
            }
            language.insert(sentences[i].text());
        }
        // Out-of-grammar means "not in the enumerated language once articles
        // are canonicalized".
        const std::vector<std::string> vocab = {"go",   "to",   "pick", "up",     "put",    "next", "the",
                                                "a",    "then", "blue", "green",  "grey",   "purple", "red",
                                                "yellow", "ball", "box",  "key",  "circle", "top",  "right",
                                                "gray", "please", "and"};
        std::mt19937_64 rng(kSeed);
        const int fuzz = 100000;
        int out_of_grammar = 0;
        for (int i = 0; i < fuzz; ++i) {
            Sentence s;
            std::size_t n = 1 + rng() % 14;
            for (std::size_t k = 0; k < n; ++k) s.tokens.push_back(vocab[rng() % vocab.size()]);
            Sentence canon = s;
            for (auto& t : canon.tokens) {
                if (t == "a") t = "the";
            }
            bool member = language.count(canon.text()) > 0;
            bool rejected = false;
            try {
                parse(s);
            } catch (const ParseError&) {
                rejected = true;
            }
            if (member == rejected) {
                return Outcome{false, "\"" + s.text() + "\" " + (member ? "rejected" : "accepted")};
            }
            out_of_grammar += member ? 0 : 1;
        }
        return Outcome{true, std::to_string(programs.size()) + " programs round-trip; " +
                                 std::to_string(out_of_grammar) + " fuzzed out-of-grammar sequences all raise ParseError"};
    });

    criterion("similarity properties", [&] {
        auto sentences = enumerate_sentences(2);
        std::mt19937_64 rng(kSeed);
        double worst_self = 0.0;
        double worst_sym = 0.0;
        for (int i = 0; i < 5000; ++i) {
            auto a = embed(sentences[rng() % sentences.size()], lex);
            auto b = embed(sentences[rng() % sentences.size()], lex);
            worst_self = std::max(worst_self, std::abs(distance(a, a)));
            worst_sym = std::max(worst_sym, std::abs(distance(a, b) - distance(b, a)));
        }
        std::uniform_real_distribution<double> scale(1e-3, 1e3);
        int sets = 100;
        for (int set = 0; set < sets; ++set) {
            std::vector<EmbeddingVector> cands;
            for (int i = 0; i < 50; ++i) cands.push_back(embed(sentences[rng() % sentences.size()], lex));
            auto query = embed(sentences[rng() % sentences.size()], lex);
            auto scaled = query;
            double alpha = scale(rng);
            for (auto& x : scaled.values) x *= alpha;
            auto argmax = [&](const EmbeddingVector& q) {
                std::vector<double> s;
                for (const auto& c : cands) s.push_back(cosine_similarity(q, c));
                double best = *std::max_element(s.begin(), s.end());
                std::vector<std::size_t> idx;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    if (s[i] >= best - 1e-12) idx.push_back(i);
                }
                return idx;
            };
            if (argmax(query) != argmax(scaled)) return Outcome{false, "argmax changed on set " + std::to_string(set)};
        }
        std::ostringstream d;
        d << std::scientific << std::setprecision(1) << "max |d(x,x)| = " << worst_self
          << ", max asymmetry = " << worst_sym << " (tolerance 1e-12); argmax stable on " << sets << " scaled sets";
        return Outcome{worst_self <= 1e-12 && worst_sym <= 1e-12, d.str()};
    });

    criterion("constraint soundness", [&] {
        if (equivalence_cases.empty()) return Outcome{false, "equivalence suite produced no cases"};
        std::size_t checked = 0;
        for (const auto& c : equivalence_cases) {
            const Trajectory& demo = c.scenario.demo;
            if (!check_success(c.pruned.explanation, demo, 2)) {
                return Outcome{false, "full method explanation \"" + c.pruned.explanation.text() + "\" fails"};
            }
            auto nu = explain_no_utterance(demo, 2, fluency_model);
            if (!check_success(nu.explanation, demo, 2)) {
                return Outcome{false, "no_utterance explanation \"" + nu.explanation.text() + "\" fails"};
            }
            checked += 2;
        }
        Sentence utterance = Sentence::from_text("pick up the red key");
        auto blind = explain_no_demo(utterance, 2, lex);
        bool counterexample = !check_success(blind.explanation, test::example_demo(), 2);
        return Outcome{counterexample, std::to_string(checked) + " full/no_utterance explanations succeed; no_demo on \"" +
                                           utterance.text() + "\" returns \"" + blind.explanation.text() + "\" which " +
                                           (counterexample ? "fails" : "unexpectedly succeeds") + " the check"};
    });

    criterion("service contract", [&] {
        test::TempDir data;
        std::filesystem::create_directories(data.path() / "tasks");
        for (const auto& entry : std::filesystem::directory_iterator(test::fixture("tasks"))) {
            std::filesystem::copy_file(entry.path(), data.path() / "tasks" / entry.path().filename());
        }
        std::filesystem::copy_file(test::fixture("example_task.json"), data.path() / "tasks" / "example.json");

        test::ServerProcess server(CFX_BINARY, data.path());
        httplib::Client client("127.0.0.1", server.port());
        httplib::Headers session = {{"X-Session-Id", "acceptance"}};
        int calls = 0;
        std::vector<std::string> failed;

        auto post = [&](const std::string& path, const Json& body) {
            ++calls;
            return client.Post(path, session, body.dump(), "application/json");
        };
        auto get = [&](const std::string& path) {
            ++calls;
            return client.Get(path, session);
        };
        auto expect = [&](const std::string& what, bool ok) {
            if (!ok) failed.push_back(what);
        };

        Json demo = read_json_file(test::fixture("example_demo.json"));
        Json explain = {{"task_id", "example"}, {"utterance", "go to the top right"}, {"actions", demo["actions"]}};

        auto health = get("/health");
        expect("GET /health", health && health->status == 200);

        auto example = post("/explain", explain);
        expect("explain example payload",
               example && example->status == 200 && Json::parse(example->body)["explanation"] == "go to the blue ball");

        Json bad_action = explain;
        bad_action["actions"][1] = "leap";
        auto bad = post("/explain", bad_action);
        expect("explain malformed action -> 422",
               bad && bad->status == 422 && Json::parse(bad->body)["error"]["index"] == 1);

        GridState facing_nothing = test::example_world();
        facing_nothing.agent.direction = Direction::south;
        auto empty = post("/explain", {{"state", to_json(facing_nothing)},
                                       {"utterance", "go to the blue ball"},
                                       {"actions", Json::array()}});
        expect("explain empty demonstration -> 409", empty && empty->status == 409);

        auto missing = post("/explain", {{"task_id", "no-such-task"}, {"utterance", "go"}, {"actions", Json::array()}});
        expect("explain unknown task -> 404", missing && missing->status == 404);

        auto parsed = post("/parse", {{"utterance", "go to the green ball"}});
        expect("parse green ball",
               parsed && parsed->status == 200 && Json::parse(parsed->body)["program"] == "goto(green,ball)");

        auto unknown = post("/parse", {{"utterance", "go to the top right"}});
        bool unknown_ok = unknown && unknown->status == 422;
        if (unknown_ok) {
            Json e = Json::parse(unknown->body)["error"];
            unknown_ok = e["kind"] == "unknown_token" && e["token"] == "top";
        }
        expect("parse top right -> unknown_token top", unknown_ok);

        auto sentences = get("/sentences?depth=1");
        expect("sentences depth 1 -> 360 lines",
               sentences && sentences->status == 200 &&
                   std::count(sentences->body.begin(), sentences->body.end(), '\n') == 360);

        auto listed = get("/tasks");
        expect("list bundled tasks", listed && listed->status == 200 && Json::parse(listed->body)["tasks"].size() == 18);

        auto one = get("/tasks/task-01");
        Json stored = read_json_file(test::fixture("tasks/task-01.json"));
        expect("get task-01", one && one->status == 200 && Json::parse(one->body) == stored);
        expect("get unknown task -> 404", [&] {
            auto r = get("/tasks/task-99");
            return r && r->status == 404;
        }());

        Json fresh = {{"id", "made-here"}, {"initial", to_json(test::example_world())}, {"goal", "pick up the red key"}};
        auto created = post("/tasks", fresh);
        auto fetched = get("/tasks/made-here");
        expect("create then get is bit-identical",
               created && created->status == 201 && fetched && fetched->status == 200 && created->body == fetched->body);

        auto executed = post("/execute", {{"task_id", "task-01"}, {"program", stored["goal"]}});
        expect("execute task-01 goal reproduces its reference demonstration",
               executed && executed->status == 200 &&
                   Json::parse(executed->body)["trajectory"] == stored["reference_demo"]);

        auto stepped = post("/step", {{"state", to_json(test::example_world())}, {"action", "turn_left"}});
        expect("step", stepped && stepped->status == 200 &&
                           state_from_json(Json::parse(stepped->body)) == step(test::example_world(), Action::turn_left));

        auto checked = post("/check", {{"task_id", "example"}, {"utterance", "go to the blue ball"}, {"actions", demo["actions"]}});
        expect("check", checked && checked->status == 200 && Json::parse(checked->body)["success"] == true);

        SessionLog log(data.path() / "sessions");
        auto events = log.read_all();
        std::size_t ours = 0;
        for (const auto& ev : events) ours += ev["session"] == "acceptance";
        // The readiness probe before the first call is logged under the default session.
        expect("one log event per call", ours == static_cast<std::size_t>(calls));

        std::ostringstream d;
        if (failed.empty()) {
            d << calls << " calls against a spawned server, all as specified; " << ours << " session events logged";
        } else {
            d << "failed:";
            for (const auto& f : failed) d << " [" << f << "]";
        }
        return Outcome{failed.empty(), d.str()};
    });

    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
