#include "cfx/gridworld.hpp"

#include <algorithm>
#include <set>

#include "cfx/error.hpp"

namespace cfx {

namespace {

constexpr std::array<std::string_view, 6> kColorNames = {"blue", "green", "grey",
                                                         "purple", "red", "yellow"};
constexpr std::array<std::string_view, 3> kKindNames = {"ball", "box", "key"};
constexpr std::array<std::string_view, 4> kDirectionNames = {"north", "east", "south", "west"};
constexpr std::array<std::string_view, 5> kActionNames = {"turn_left", "turn_right", "forward",
                                                          "pickup", "drop"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

std::string describe(const WorldObject& o) {
    return std::string(to_string(o.color)) + " " + std::string(to_string(o.kind)) + " #" +
           std::to_string(o.id);
}

} // namespace

std::string_view to_string(Color c) { return kColorNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(ObjectKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Direction d) { return kDirectionNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

std::optional<Color> color_from_string(std::string_view s) { return lookup<Color>(kColorNames, s); }
std::optional<ObjectKind> kind_from_string(std::string_view s) {
    return lookup<ObjectKind>(kKindNames, s);
}
std::optional<Direction> direction_from_string(std::string_view s) {
    return lookup<Direction>(kDirectionNames, s);
}
std::optional<Action> action_from_string(std::string_view s) {
    return lookup<Action>(kActionNames, s);
}

Cell neighbor(Cell c, Direction d) {
    switch (d) {
    case Direction::north: return {c.col, c.row - 1};
    case Direction::east: return {c.col + 1, c.row};
    case Direction::south: return {c.col, c.row + 1};
    case Direction::west: return {c.col - 1, c.row};
    }
    return c;
}

Direction turn_left(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}

Direction turn_right(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}

const WorldObject* GridState::object_at(Cell c) const {
    for (const auto& o : objects) {
        if (o.position == c) return &o;
    }
    return nullptr;
}

const WorldObject* GridState::object_by_id(int id) const {
    for (const auto& o : objects) {
        if (o.id == id) return &o;
    }
    return nullptr;
}

void validate(const GridState& s) {
    if (s.width < 3 || s.height < 3) {
        throw InvalidState("grid must be at least 3x3, got " + std::to_string(s.width) + "x" +
                           std::to_string(s.height));
    }
    if (!s.in_interior(s.agent.position)) throw InvalidState("agent outside the room interior");
    std::set<int> ids;
    std::set<Cell> cells;
    for (const auto& o : s.objects) {
        if (!ids.insert(o.id).second) throw InvalidState("duplicate object id " + std::to_string(o.id));
        if (!s.in_interior(o.position)) throw InvalidState(describe(o) + " outside the room interior");
        if (!cells.insert(o.position).second) throw InvalidState(describe(o) + " shares a cell");
        if (o.position == s.agent.position) throw InvalidState(describe(o) + " is under the agent");
    }
    if (s.carrying && !ids.insert(s.carrying->id).second) {
        throw InvalidState("carried object id " + std::to_string(s.carrying->id) + " is also on the grid");
    }
}

GridState normalized(GridState s) {
    std::sort(s.objects.begin(), s.objects.end(),
              [](const WorldObject& a, const WorldObject& b) { return a.id < b.id; });
    if (s.carrying) s.carrying->position = {};
    return s;
}

GridState step(const GridState& state, Action action) {
    GridState next = state;
    switch (action) {
    case Action::turn_left:
        next.agent.direction = turn_left(state.agent.direction);
        break;
    case Action::turn_right:
        next.agent.direction = turn_right(state.agent.direction);
        break;
    case Action::forward: {
        Cell target = state.faced_cell();
        if (state.is_free(target)) next.agent.position = target;
        break;
    }
    case Action::pickup: {
        if (state.carrying) throw IllegalAction("pickup while already carrying " + describe(*state.carrying));
        const WorldObject* ahead = state.object_at(state.faced_cell());
        if (ahead == nullptr) throw IllegalAction("pickup with no object ahead");
        int id = ahead->id;
        auto it = std::find_if(next.objects.begin(), next.objects.end(),
                               [id](const WorldObject& o) { return o.id == id; });
        next.carrying = *it;
        next.carrying->position = {};
        next.objects.erase(it);
        break;
    }
    case Action::drop: {
        if (!state.carrying) throw IllegalAction("drop with empty hands");
        Cell target = state.faced_cell();
        if (!state.is_free(target)) throw IllegalAction("drop target cell is blocked");
        WorldObject placed = *state.carrying;
        placed.position = target;
        auto at = std::lower_bound(next.objects.begin(), next.objects.end(), placed.id,
                                   [](const WorldObject& o, int id) { return o.id < id; });
        next.objects.insert(at, placed);
        next.carrying.reset();
        break;
    }
    }
    return next;
}

std::optional<WorldObject> facing_object(const GridState& state) {
    if (const WorldObject* o = state.object_at(state.faced_cell())) return *o;
    return std::nullopt;
}

std::vector<GridState> replay(const Trajectory& traj) {
    validate(traj.initial);
    std::vector<GridState> states;
    states.reserve(traj.actions.size() + 1);
    states.push_back(traj.initial);
    for (std::size_t i = 0; i < traj.actions.size(); ++i) {
        try {
            states.push_back(step(states.back(), traj.actions[i]));
        } catch (const IllegalAction& e) {
            throw InvalidTrajectory(i, e.what());
        }
    }
    return states;
}

} // namespace cfx
