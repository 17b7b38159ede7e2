#include "cfx/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <sstream>

#include "cfx/error.hpp"

namespace cfx::verify {

namespace {

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <typename F>
CheckReport timed(std::string name, F&& body) {
    auto start = std::chrono::steady_clock::now();
    CheckReport r;
    r.name = std::move(name);
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

void random_walk(std::mt19937_64& rng, GridState& state, std::vector<Action>& actions, std::size_t steps) {
    for (std::size_t i = 0; i < steps; ++i) {
        Action a = kActions[below(rng, 3)];
        state = step(state, a);
        actions.push_back(a);
    }
}

} // namespace

GridState random_world(std::mt19937_64& rng, int width, int height) {
    std::vector<Cell> cells;
    for (int r = 1; r <= height - 2; ++r) {
        for (int c = 1; c <= width - 2; ++c) cells.push_back({c, r});
    }
    for (std::size_t i = cells.size() - 1; i > 0; --i) std::swap(cells[i], cells[below(rng, i + 1)]);
    GridState s;
    s.width = width;
    s.height = height;
    s.agent = {cells[0], static_cast<Direction>(below(rng, 4))};
    std::size_t count = std::min<std::size_t>(3 + below(rng, 5), cells.size() - 1);
    for (std::size_t i = 0; i < count; ++i) {
        s.objects.push_back({static_cast<int>(i + 1), kKinds[below(rng, 3)], kColors[below(rng, 6)], cells[i + 1]});
    }
    return s;
}

Trajectory random_demo(std::mt19937_64& rng, const GridState& world) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        GridState state = world;
        std::vector<Action> actions;
        random_walk(rng, state, actions, below(rng, 6));

        std::vector<Command> cmds;
        std::size_t n = 1 + below(rng, 2);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& objs = world.objects;
            const WorldObject& o = objs[below(rng, objs.size())];
            const WorldObject& other = objs[below(rng, objs.size())];
            switch (below(rng, 3)) {
            case 0: cmds.push_back(Command::go_to({o.color, o.kind})); break;
            case 1: cmds.push_back(Command::pick_up({o.color, o.kind})); break;
            default: cmds.push_back(Command::put_next({o.color, o.kind}, {other.color, other.kind})); break;
            }
        }
        try {
            Trajectory goal = execute(Program(cmds), state);
            for (Action a : goal.actions) state = step(state, a);
            actions.insert(actions.end(), goal.actions.begin(), goal.actions.end());
        } catch (const Unsatisfiable&) {
            continue;
        }
        random_walk(rng, state, actions, below(rng, 4));
        return {world, std::move(actions)};
    }
    return {world, {}};
}

Sentence random_utterance(std::mt19937_64& rng, const Trajectory& demo) {
    Program base = program_at(below(rng, program_count(2)));
    if (below(rng, 2) == 0) {
        auto states = replay(demo);
        auto members = consistent_indices(states, 2);
        if (!members.empty()) base = program_at(members[below(rng, members.size())]);
    }
    static const std::vector<std::pair<std::string, std::vector<std::string>>> kSwaps = {
        {"ball", {"circle", "sphere"}}, {"box", {"cube", "square"}},  {"go", {"navigate", "walk", "move"}},
        {"pick", {"grab"}},             {"put", {"place"}},           {"grey", {"gray"}},
        {"the", {"a", "that"}},         {"next", {"beside", "near"}},
    };
    static const std::vector<std::string> kNoise = {"please", "top", "right", "left", "over", "there",
                                                    "corner", "quickly", "object", "and", "then"};
    Sentence s = unparse(base);
    std::vector<std::string> out;
    for (const auto& tok : s.tokens) {
        std::string t = tok;
        for (const auto& [from, to] : kSwaps) {
            if (t == from && below(rng, 3) == 0) {
                t = to[below(rng, to.size())];
                break;
            }
        }
        if (below(rng, 10) == 0) continue;
        out.push_back(t);
        if (below(rng, 8) == 0) out.push_back(kNoise[below(rng, kNoise.size())]);
    }
    if (out.empty()) out.push_back("go");
    return Sentence{out};
}

Scenario random_scenario(std::mt19937_64& rng) {
    for (;;) {
        GridState world = random_world(rng);
        Trajectory demo = random_demo(rng, world);
        auto states = replay(demo);
        if (consistent_indices(states, 1).empty()) continue;
        Sentence utterance = random_utterance(rng, demo);
        return {std::move(demo), std::move(utterance)};
    }
}

GridState soundness_world() {
    GridState s;
    s.width = 8;
    s.height = 8;
    s.agent = {{3, 3}, Direction::east};
    s.objects = {
        {1, ObjectKind::ball, Color::blue, {1, 1}},   {2, ObjectKind::box, Color::green, {6, 1}},
        {3, ObjectKind::key, Color::red, {1, 6}},     {4, ObjectKind::ball, Color::yellow, {6, 6}},
        {5, ObjectKind::box, Color::grey, {4, 2}},    {6, ObjectKind::key, Color::purple, {2, 4}},
        {7, ObjectKind::ball, Color::green, {5, 4}},  {8, ObjectKind::key, Color::blue, {3, 6}},
    };
    return s;
}

CheckReport check_enumeration_counts() {
    return timed("enumeration counts", [](CheckReport& r) {
        std::size_t d1 = enumerate_programs(1).size();
        std::size_t d2 = enumerate_programs(2).size();
        std::size_t s1 = enumerate_sentences(1).size();
        std::size_t s2 = enumerate_sentences(2).size();
        r.passed = d1 == 360 && d2 == 129960 && s1 == d1 && s2 == d2;
        std::ostringstream os;
        os << "programs " << d1 << "/" << d2 << ", sentences " << s1 << "/" << s2;
        r.detail = os.str();
    });
}

CheckReport check_consistent_set_oracle(int worlds, int depth_bound, std::uint64_t seed) {
    return timed("consistent set oracle", [&](CheckReport& r) {
        std::mt19937_64 rng(seed);
        ProgramSet all = enumerate_programs(depth_bound);
        std::size_t total_members = 0;
        for (int w = 0; w < worlds; ++w) {
            Scenario sc = random_scenario(rng);
            auto states = replay(sc.demo);
            ProgramSet brute;
            for (const auto& p : all) {
                if (satisfied(p, states)) brute.push_back(p);
            }
            ProgramSet fast = consistent_set(sc.demo, depth_bound);
            if (!(brute == fast)) {
                r.passed = false;
                r.detail = "mismatch on world " + std::to_string(w) + ": brute " + std::to_string(brute.size()) +
                           " vs consistent_set " + std::to_string(fast.size());
                return;
            }
            total_members += fast.size();
        }
        r.passed = true;
        r.detail = std::to_string(worlds) + " worlds, " + std::to_string(total_members) + " members total";
    });
}

CheckReport check_executor_soundness(const GridState& world) {
    return timed("executor soundness", [&](CheckReport& r) {
        std::size_t solvable = 0;
        for (const auto& p : enumerate_programs(1)) {
            Trajectory traj;
            try {
                traj = execute(p, world);
            } catch (const Unsatisfiable&) {
                continue;
            }
            ++solvable;
            auto members = consistent_set(traj, static_cast<int>(p.depth()));
            if (std::find(members.begin(), members.end(), p) == members.end()) {
                r.passed = false;
                r.detail = to_prefix(p) + " missing from its own consistent set";
                return;
            }
        }
        r.passed = solvable > 0;
        r.detail = std::to_string(solvable) + " of 360 programs solvable, all sound";
    });
}

CheckReport check_naive_pruned_equivalence(const Lexicon& lex, int triples, int depth_bound, std::uint64_t seed) {
    return timed("naive/pruned equivalence (depth " + std::to_string(depth_bound) + ")", [&](CheckReport& r) {
        std::mt19937_64 rng(seed);
        for (int i = 0; i < triples; ++i) {
            Scenario sc = random_scenario(rng);
            ExplanationRequest req{sc.utterance, sc.demo, depth_bound};
            ExplanationResult naive = explain_naive(req, lex);
            ExplanationResult pruned = explain_pruned(req, lex);
            bool same = naive.explanation == pruned.explanation && naive.program == pruned.program &&
                        std::memcmp(&*naive.similarity, &*pruned.similarity, sizeof(double)) == 0 &&
                        naive.candidates == pruned.candidates;
            if (!same) {
                r.passed = false;
                r.detail = "triple " + std::to_string(i) + " (\"" + sc.utterance.text() + "\"): naive \"" +
                           naive.explanation.text() + "\" vs pruned \"" + pruned.explanation.text() + "\"";
                return;
            }
        }
        r.passed = true;
        r.detail = std::to_string(triples) + " triples identical";
    });
}

std::vector<CheckReport> run_all(const Lexicon& lex, int depth_bound, std::uint64_t seed) {
    return {
        check_enumeration_counts(),
        check_consistent_set_oracle(10, depth_bound, seed),
        check_executor_soundness(soundness_world()),
        check_naive_pruned_equivalence(lex, 20, depth_bound, seed),
    };
}

} // namespace cfx::verify
