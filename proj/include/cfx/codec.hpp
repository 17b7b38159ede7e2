#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfx/error.hpp"
#include "cfx/explain.hpp"
#include "cfx/gridworld.hpp"
#include "cfx/programs.hpp"

namespace cfx {

/// Keys are emitted in insertion order, which is the canonical field order.
using Json = nlohmann::ordered_json;

/// A structurally malformed document (missing field, wrong type, bad name).
class CodecError : public Error {
public:
    using Error::Error;
};

Json to_json(const GridState& s);
/// Validates and normalizes. Throws CodecError or InvalidState.
GridState state_from_json(const Json& j);

Json to_json(const std::vector<Action>& actions);
/// Throws InvalidTrajectory naming the first entry that is not an action name.
std::vector<Action> actions_from_json(const Json& j);

Json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const Json& j);

Json to_json(const Candidate& c);
/// `max_candidates` truncates the ranking; nullopt keeps all of it.
Json to_json(const ExplanationResult& r, std::optional<std::size_t> max_candidates = std::nullopt);

Json to_json(const ParseError& e);

/// Program given either in prefix form or as a grammar sentence.
Program program_from_text(const std::string& text);

/// Reads a JSON file. Throws Error when missing or unparsable.
Json read_json_file(const std::string& path);

} // namespace cfx
