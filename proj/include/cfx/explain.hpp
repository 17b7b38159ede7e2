#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cfx/grammar.hpp"
#include "cfx/programs.hpp"
#include "cfx/similarity.hpp"

namespace cfx {

enum class Method { full, no_demo, no_utterance };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

/// How a candidate's parse is checked against the demonstration.
enum class ConstraintMode {
    /// The parse must be among the programs the demonstration satisfies.
    goal_set,
    /// The parse's executed trajectory must equal the demonstration exactly.
    exact_denotation,
};

struct ExplanationRequest {
    Sentence utterance;
    Trajectory demonstration;
    int depth_bound = kDefaultDepth;
    ConstraintMode constraint = ConstraintMode::goal_set;
};

struct Candidate {
    Sentence sentence;
    Program program;
    std::optional<double> similarity;
    std::optional<double> perplexity;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct ExplanationResult {
    Sentence explanation;
    Program program;
    /// Cosine similarity to the utterance; absent when no utterance was used.
    std::optional<double> similarity;
    /// Fluency score of the explanation; only set by the no_utterance method.
    std::optional<double> perplexity;
    /// Best first. Ties keep canonical enumeration order.
    std::vector<Candidate> candidates;
    Method method = Method::full;

    friend bool operator==(const ExplanationResult&, const ExplanationResult&) = default;
};

/// Scans every sentence of the bounded grammar, keeps those whose parse meets
/// the constraint and returns the first one with maximal similarity.
/// Throws NoValidExplanation.
ExplanationResult explain_naive(const ExplanationRequest& req, const SentenceEncoder& encoder);
ExplanationResult explain_naive(const ExplanationRequest& req, const Lexicon& lex);

/// Same result as explain_naive, scoring only the unparsed members of the
/// demonstration's consistent program set.
ExplanationResult explain_pruned(const ExplanationRequest& req, const SentenceEncoder& encoder);
ExplanationResult explain_pruned(const ExplanationRequest& req, const Lexicon& lex);

/// Most similar grammar sentence, ignoring the demonstration.
ExplanationResult explain_no_demo(const Sentence& utterance, int depth_bound, const SentenceEncoder& encoder);
ExplanationResult explain_no_demo(const Sentence& utterance, int depth_bound, const Lexicon& lex);

/// Most fluent sentence whose parse the demonstration satisfies, ignoring
/// the utterance. Throws NoValidExplanation.
ExplanationResult explain_no_utterance(const Trajectory& demo, int depth_bound, const FluencyModel& model);

/// Whether `s` parses to a program the demonstration satisfies within the
/// depth bound. Parse failures are simply false.
bool check_success(const Sentence& s, const Trajectory& demo, int depth_bound);

} // namespace cfx
