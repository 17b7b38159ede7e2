#include <doctest.h>

#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "cfx/service.hpp"
#include "support.hpp"

using namespace cfx;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cfx_run(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(CFX_BINARY) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const std::string& s) { return "'" + s + "'"; }

} // namespace

TEST_CASE("sentences lists the bounded space") {
    Run r = cfx_run("sentences --depth 1");
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 360);
    CHECK(r.out.starts_with("go to the blue ball\n"));
}

TEST_CASE("parse prints the program or fails with a domain error") {
    Run ok = cfx_run("parse " + q("go to the green ball"));
    CHECK(ok.code == 0);
    CHECK(ok.out == "goto(green,ball)\n");

    Run bad = cfx_run("parse " + q("go to the blue circle"), true);
    CHECK(bad.code == 1);
    CHECK(bad.out.find("circle") != std::string::npos);

    Run structured = cfx_run("--format structured parse " + q("go to the top right"));
    CHECK(structured.code == 1);
    Json err = Json::parse(structured.out)["error"];
    CHECK(err["kind"] == "unknown_token");
    CHECK(err["token"] == "top");
}

TEST_CASE("explain reproduces the example answer") {
    std::string base = "explain --task " + test::fixture("example_task.json") + " --demo " + test::fixture("example_demo.json");
    for (const char* u : {"go to the blue circle", "go to the top right"}) {
        Run r = cfx_run(base + " --utterance " + q(u));
        CHECK(r.code == 0);
        CHECK(r.out == "go to the blue ball\n");
    }
}

TEST_CASE("structured output is the library serialization") {
    Lexicon lex = Lexicon::load(test::fixture("lexicon.txt"));
    auto expected = explain_pruned({Sentence::from_text("go to the top right"), test::example_demo(), 2}, lex);
    Run r = cfx_run("--format structured explain --task " + test::fixture("example_world.json") + " --demo " +
                    test::fixture("example_demo.json") + " --utterance " + q("go to the top right"));
    REQUIRE(r.code == 0);
    CHECK(r.out == to_json(expected).dump(2) + "\n");

    Trajectory plan = execute(Program::go_to({Color::blue, ObjectKind::ball}), test::example_world());
    Run e = cfx_run("--format structured execute --task " + test::fixture("example_task.json") + " --program " +
                    q("goto(blue,ball)"));
    REQUIRE(e.code == 0);
    Json j = Json::parse(e.out);
    CHECK(j["trajectory"] == to_json(plan));
}

TEST_CASE("ablation methods are selectable") {
    std::string base = "explain --task " + test::fixture("example_task.json");
    Run nd = cfx_run(base + " --method no_demo --utterance " + q("pick up the red key"));
    CHECK(nd.code == 0);
    CHECK(nd.out == "pick up the red key\n");
    Run nu = cfx_run(base + " --method no_utterance --demo " + test::fixture("example_demo.json"));
    CHECK(nu.code == 0);
    CHECK(nu.out.find("blue ball") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cfx_run("").code == 2);
    CHECK(cfx_run("explode").code == 2);
    CHECK(cfx_run("sentences --depth zero").code == 2);
    CHECK(cfx_run("execute --task /nonexistent.json --program " + q("goto(red,key)")).code == 2);
    CHECK(cfx_run("explain --task " + test::fixture("example_task.json") + " --utterance x").code == 2);
}

TEST_CASE("unsatisfiable programs are domain errors") {
    Run r = cfx_run("execute --task " + test::fixture("example_task.json") + " --program " + q("pick up the purple box"));
    CHECK(r.code == 1);
}

TEST_CASE("gen-tasks writes the same set as the library") {
    test::TempDir dir;
    Run r = cfx_run("gen-tasks --n 5 --seed 3 --out " + dir.path().string());
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
    TaskStore store(dir.path());
    auto tasks = generate_tasks(5, 3);
    for (const auto& t : tasks) CHECK(store.get(t.id) == t);
}

TEST_CASE("corpus emits parse-consistent pairs") {
    Run r = cfx_run("corpus --n 20 --seed 4");
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        REQUIRE(tab != std::string::npos);
        CHECK(to_prefix(parse(Sentence::from_text(line.substr(0, tab)))) == line.substr(tab + 1));
        ++n;
    }
    CHECK(n == 20);
}

TEST_CASE("verify runs the depth-1 suites") {
    Run r = cfx_run("verify --depth 1");
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}
