#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cfx/explain.hpp"
#include "cfx/similarity.hpp"

namespace cfx::verify {

/// A world, a demonstration in it and an utterance about it.
struct Scenario {
    Trajectory demo;
    Sentence utterance;
};

/// Random single-room world with 3-7 objects and the agent on a free cell.
GridState random_world(std::mt19937_64& rng, int width = 8, int height = 8);

/// Demonstration built from a random goal: a short random walk, the planned
/// goal, then a few more moves. Always replays.
Trajectory random_demo(std::mt19937_64& rng, const GridState& world);

/// Grammar sentence perturbed with synonyms, dropped articles and unknown
/// words, sometimes about the demonstrated goal.
Sentence random_utterance(std::mt19937_64& rng, const Trajectory& demo);

Scenario random_scenario(std::mt19937_64& rng);

/// Fixed 8x8 world with eight objects used by the executor soundness check.
GridState soundness_world();

struct CheckReport {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

CheckReport check_enumeration_counts();

/// consistent_set against a brute-force filter of satisfied() over the full
/// enumeration, on `worlds` seeded scenarios.
CheckReport check_consistent_set_oracle(int worlds, int depth_bound, std::uint64_t seed);

/// Every solvable depth-1 program is in the consistent set of its own
/// executed trajectory.
CheckReport check_executor_soundness(const GridState& world);

/// explain_pruned equals explain_naive (sentence and similarity, bit-exact)
/// on `triples` seeded scenarios.
CheckReport check_naive_pruned_equivalence(const Lexicon& lex, int triples, int depth_bound, std::uint64_t seed);

std::vector<CheckReport> run_all(const Lexicon& lex, int depth_bound, std::uint64_t seed);

} // namespace cfx::verify
