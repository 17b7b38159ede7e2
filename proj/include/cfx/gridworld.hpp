#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfx {

// Enumerators are declared in alphabetical order; the underlying value is the
// tie-breaking rank used by enumeration and the planner.
enum class Color : std::uint8_t { blue, green, grey, purple, red, yellow };
enum class ObjectKind : std::uint8_t { ball, box, key };
enum class Direction : std::uint8_t { north, east, south, west };
enum class Action : std::uint8_t { turn_left, turn_right, forward, pickup, drop };

inline constexpr std::array<Color, 6> kColors = {Color::blue,   Color::green, Color::grey,
                                                 Color::purple, Color::red,   Color::yellow};
inline constexpr std::array<ObjectKind, 3> kKinds = {ObjectKind::ball, ObjectKind::box,
                                                     ObjectKind::key};
inline constexpr std::array<Action, 5> kActions = {Action::turn_left, Action::turn_right,
                                                   Action::forward, Action::pickup, Action::drop};

std::string_view to_string(Color c);
std::string_view to_string(ObjectKind k);
std::string_view to_string(Direction d);
std::string_view to_string(Action a);

// Lookups by name; nullopt for anything outside the closed enumeration.
std::optional<Color> color_from_string(std::string_view s);
std::optional<ObjectKind> kind_from_string(std::string_view s);
std::optional<Direction> direction_from_string(std::string_view s);
std::optional<Action> action_from_string(std::string_view s);

/// Grid cell, (0,0) is the top-left corner; rows grow southwards.
struct Cell {
    int col = 0;
    int row = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

Cell neighbor(Cell c, Direction d);
Direction turn_left(Direction d);
Direction turn_right(Direction d);

struct WorldObject {
    int id = 0;
    ObjectKind kind = ObjectKind::ball;
    Color color = Color::blue;
    Cell position;  // meaningless while carried

    friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

struct AgentPose {
    Cell position;
    Direction direction = Direction::north;

    friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

/// Full world snapshot of a single walled room.
///
/// The perimeter rows and columns are wall; objects and the agent live in the
/// interior. `objects` is kept sorted by id so that equal worlds compare equal
/// regardless of how they were reached.
struct GridState {
    int width = 8;
    int height = 8;
    std::vector<WorldObject> objects;
    AgentPose agent;
    std::optional<WorldObject> carrying;

    bool in_interior(Cell c) const {
        return c.col >= 1 && c.row >= 1 && c.col <= width - 2 && c.row <= height - 2;
    }
    const WorldObject* object_at(Cell c) const;
    const WorldObject* object_by_id(int id) const;
    bool is_free(Cell c) const { return in_interior(c) && object_at(c) == nullptr; }
    Cell faced_cell() const { return neighbor(agent.position, agent.direction); }

    friend bool operator==(const GridState&, const GridState&) = default;
};

/// Throws InvalidState when `s` breaks a structural invariant.
void validate(const GridState& s);

/// Sorts objects by id; every constructor of states should pass through this.
GridState normalized(GridState s);

GridState step(const GridState& state, Action action);

std::optional<WorldObject> facing_object(const GridState& state);

struct Trajectory {
    GridState initial;
    std::vector<Action> actions;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// State sequence of length actions.size() + 1. Throws InvalidTrajectory
/// naming the first action that step() rejects.
std::vector<GridState> replay(const Trajectory& traj);

} // namespace cfx
