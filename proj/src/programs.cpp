#include "cfx/programs.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>

#include "cfx/error.hpp"

namespace cfx {

std::size_t descriptor_index(Descriptor d) {
    return static_cast<std::size_t>(d.color) * kKinds.size() + static_cast<std::size_t>(d.kind);
}

Descriptor descriptor_at(std::size_t index) {
    return {kColors.at(index / kKinds.size()), kKinds[index % kKinds.size()]};
}

std::size_t atomic_index(const Command& c) {
    switch (c.kind) {
    case CommandKind::go_to: return descriptor_index(c.object);
    case CommandKind::pick_up: return kDescriptorCount + descriptor_index(c.object);
    case CommandKind::put_next:
        return 2 * kDescriptorCount + descriptor_index(c.object) * kDescriptorCount +
               descriptor_index(c.target);
    }
    return 0;
}

Command atomic_at(std::size_t index) {
    if (index < kDescriptorCount) return Command::go_to(descriptor_at(index));
    if (index < 2 * kDescriptorCount) return Command::pick_up(descriptor_at(index - kDescriptorCount));
    if (index >= kAtomicCount) throw std::out_of_range("atomic command index out of range");
    std::size_t rest = index - 2 * kDescriptorCount;
    return Command::put_next(descriptor_at(rest / kDescriptorCount),
                             descriptor_at(rest % kDescriptorCount));
}

Program::Program(std::vector<Command> commands) : commands_(std::move(commands)) {
    if (commands_.empty()) throw std::invalid_argument("a program needs at least one command");
}

Program Program::seq(const Program& first, const Program& second) {
    std::vector<Command> all(first.commands_);
    all.insert(all.end(), second.commands_.begin(), second.commands_.end());
    return Program(std::move(all));
}

int clamp_depth(int depth_bound) {
    if (depth_bound < 1) throw std::invalid_argument("depth bound must be positive");
    return std::min(depth_bound, kMaxCommands);
}

std::size_t program_count(int depth_bound) {
    int depth = clamp_depth(depth_bound);
    std::size_t total = 0;
    std::size_t tier = 1;
    for (int n = 1; n <= depth; ++n) {
        tier *= kAtomicCount;
        total += tier;
    }
    return total;
}

std::size_t canonical_index(const Program& p) {
    auto cmds = p.commands();
    if (cmds.empty() || cmds.size() > static_cast<std::size_t>(kMaxCommands)) {
        throw std::out_of_range("program depth outside the enumerable range");
    }
    std::size_t offset = 0;
    std::size_t tier = 1;
    for (std::size_t n = 1; n < cmds.size(); ++n) {
        tier *= kAtomicCount;
        offset += tier;
    }
    std::size_t within = 0;
    for (const auto& c : cmds) within = within * kAtomicCount + atomic_index(c);
    return offset + within;
}

Program program_at(std::size_t index) {
    std::size_t tier = kAtomicCount;
    std::size_t n = 1;
    while (index >= tier) {
        index -= tier;
        tier *= kAtomicCount;
        ++n;
        if (n > static_cast<std::size_t>(kMaxCommands)) throw std::out_of_range("program index out of range");
    }
    std::vector<Command> cmds(n);
    for (std::size_t i = n; i-- > 0;) {
        cmds[i] = atomic_at(index % kAtomicCount);
        index /= kAtomicCount;
    }
    return Program(std::move(cmds));
}

ProgramSet enumerate_programs(int depth_bound) {
    std::size_t count = program_count(depth_bound);
    ProgramSet out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(program_at(i));
    return out;
}

// ---------------------------------------------------------------------------
// Goal predicates

namespace {

bool adjacent(Cell a, Cell b) {
    return std::abs(a.col - b.col) + std::abs(a.row - b.row) == 1;
}

bool pickup_event(std::span<const GridState> states, std::size_t t) {
    return t > 0 && !states[t - 1].carrying && states[t].carrying;
}

bool drop_event(std::span<const GridState> states, std::size_t t) {
    return t > 0 && states[t - 1].carrying && !states[t].carrying;
}

bool witnessed_at(const Command& c, std::span<const GridState> states, std::size_t t) {
    switch (c.kind) {
    case CommandKind::go_to: {
        auto ahead = facing_object(states[t]);
        return ahead && c.object.matches(*ahead);
    }
    case CommandKind::pick_up:
        return pickup_event(states, t) && c.object.matches(*states[t].carrying);
    case CommandKind::put_next: {
        if (!drop_event(states, t)) return false;
        const WorldObject& dropped = *states[t - 1].carrying;
        if (!c.object.matches(dropped)) return false;
        const WorldObject* landed = states[t].object_by_id(dropped.id);
        if (landed == nullptr) return false;
        return std::any_of(states[t].objects.begin(), states[t].objects.end(), [&](const WorldObject& o) {
            return o.id != dropped.id && c.target.matches(o) && adjacent(o.position, landed->position);
        });
    }
    }
    return false;
}

} // namespace

bool satisfied(const Program& prog, std::span<const GridState> states) {
    std::size_t from = 0;
    for (const auto& c : prog.commands()) {
        std::size_t t = from;
        while (t < states.size() && !witnessed_at(c, states, t)) ++t;
        if (t == states.size()) return false;
        from = t;
    }
    return !prog.commands().empty();
}

std::vector<std::size_t> consistent_indices(std::span<const GridState> states, int depth_bound) {
    int depth = clamp_depth(depth_bound);
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    // Earliest and latest witness time of every atomic command.
    std::vector<std::size_t> first(kAtomicCount, kNone);
    std::vector<std::size_t> last(kAtomicCount, kNone);
    auto record = [&](std::size_t atomic, std::size_t t) {
        if (first[atomic] == kNone) first[atomic] = t;
        last[atomic] = t;
    };

    for (std::size_t t = 0; t < states.size(); ++t) {
        const GridState& s = states[t];
        if (auto ahead = facing_object(s)) {
            record(atomic_index(Command::go_to({ahead->color, ahead->kind})), t);
        }
        if (pickup_event(states, t)) {
            record(atomic_index(Command::pick_up({s.carrying->color, s.carrying->kind})), t);
        }
        if (drop_event(states, t)) {
            const WorldObject& dropped = *states[t - 1].carrying;
            const WorldObject* landed = s.object_by_id(dropped.id);
            std::vector<bool> seen(kDescriptorCount, false);
            for (const auto& o : s.objects) {
                if (o.id == dropped.id || !landed || !adjacent(o.position, landed->position)) continue;
                std::size_t target = descriptor_index({o.color, o.kind});
                if (seen[target]) continue;
                seen[target] = true;
                record(atomic_index(Command::put_next({dropped.color, dropped.kind}, {o.color, o.kind})), t);
            }
        }
    }

    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < kAtomicCount; ++i) {
        if (first[i] != kNone) out.push_back(i);
    }
    if (depth >= 2) {
        for (std::size_t i = 0; i < kAtomicCount; ++i) {
            if (first[i] == kNone) continue;
            for (std::size_t j = 0; j < kAtomicCount; ++j) {
                if (last[j] != kNone && first[i] <= last[j]) {
                    out.push_back(kAtomicCount + i * kAtomicCount + j);
                }
            }
        }
    }
    return out;
}

ProgramSet consistent_set(const Trajectory& traj, int depth_bound) {
    auto states = replay(traj);
    ProgramSet out;
    for (std::size_t idx : consistent_indices(states, depth_bound)) out.push_back(program_at(idx));
    return out;
}

// ---------------------------------------------------------------------------
// Planner

namespace {

constexpr std::array<Action, 3> kMoves = {Action::turn_left, Action::turn_right, Action::forward};
constexpr int kUnreached = -1;

/// Navigation graph over agent poses for a fixed object layout.
class NavGraph {
public:
    explicit NavGraph(const GridState& s) : state_(s), size_(s.width * s.height * 4) {}

    std::size_t index(AgentPose p) const {
        return static_cast<std::size_t>(((p.position.row * state_.width) + p.position.col) * 4 +
                                        static_cast<int>(p.direction));
    }

    AgentPose pose(std::size_t i) const {
        int cell = static_cast<int>(i / 4);
        return {{cell % state_.width, cell / state_.width}, static_cast<Direction>(i % 4)};
    }

    bool standable(Cell c) const {
        return state_.in_interior(c) && (state_.object_at(c) == nullptr);
    }

    AgentPose next(AgentPose p, Action a) const {
        switch (a) {
        case Action::turn_left: return {p.position, turn_left(p.direction)};
        case Action::turn_right: return {p.position, turn_right(p.direction)};
        case Action::forward: {
            Cell target = neighbor(p.position, p.direction);
            return standable(target) ? AgentPose{target, p.direction} : p;
        }
        default: return p;
        }
    }

    std::vector<int> distances_from(AgentPose start) const {
        std::vector<int> dist(size_, kUnreached);
        std::deque<std::size_t> queue{index(start)};
        dist[index(start)] = 0;
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop_front();
            for (Action a : kMoves) {
                std::size_t nxt = index(next(pose(cur), a));
                if (dist[nxt] == kUnreached) {
                    dist[nxt] = dist[cur] + 1;
                    queue.push_back(nxt);
                }
            }
        }
        return dist;
    }

    /// Shortest move sequence from `start` to any pose accepted by `goal`;
    /// among shortest plans, the lexicographically smallest in action order.
    template <typename Goal>
    std::optional<std::vector<Action>> plan(AgentPose start, Goal&& goal) const {
        std::vector<std::vector<std::size_t>> preds(size_);
        std::vector<int> dist(size_, kUnreached);
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < size_; ++i) {
            AgentPose p = pose(i);
            if (!standable(p.position)) continue;
            for (Action a : kMoves) preds[index(next(p, a))].push_back(i);
            if (goal(p)) {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop_front();
            for (std::size_t prev : preds[cur]) {
                if (dist[prev] == kUnreached) {
                    dist[prev] = dist[cur] + 1;
                    queue.push_back(prev);
                }
            }
        }
        if (dist[index(start)] == kUnreached) return std::nullopt;
        std::vector<Action> out;
        AgentPose cur = start;
        while (dist[index(cur)] > 0) {
            for (Action a : kMoves) {
                AgentPose nxt = next(cur, a);
                if (dist[index(nxt)] == dist[index(cur)] - 1) {
                    out.push_back(a);
                    cur = nxt;
                    break;
                }
            }
        }
        return out;
    }

private:
    const GridState& state_;
    std::size_t size_;
};

Direction opposite(Direction d) { return turn_left(turn_left(d)); }

bool faces_cell(AgentPose p, Cell c) { return neighbor(p.position, p.direction) == c; }

std::string describe(Descriptor d) {
    return std::string(to_string(d.color)) + " " + std::string(to_string(d.kind));
}

class Executor {
public:
    explicit Executor(const GridState& initial) : state_(initial), trajectory_{initial, {}} {}

    void run(const Command& c) {
        switch (c.kind) {
        case CommandKind::go_to: go_to(c.object); break;
        case CommandKind::pick_up: pick_up(c.object); break;
        case CommandKind::put_next: put_next(c.object, c.target); break;
        }
    }

    Trajectory finish() && { return std::move(trajectory_); }

private:
    void apply(Action a) {
        state_ = step(state_, a);
        trajectory_.actions.push_back(a);
    }

    template <typename Goal>
    void walk_to(Goal&& goal, const std::string& what) {
        NavGraph graph(state_);
        auto moves = graph.plan(state_.agent, std::forward<Goal>(goal));
        if (!moves) throw Unsatisfiable("no path to " + what);
        for (Action a : *moves) apply(a);
    }

    void go_to(Descriptor d) {
        NavGraph graph(state_);
        auto dist = graph.distances_from(state_.agent);
        const WorldObject* best = nullptr;
        int best_dist = kUnreached;
        for (const auto& o : state_.objects) {
            if (!d.matches(o)) continue;
            for (Direction dir : {Direction::north, Direction::east, Direction::south, Direction::west}) {
                AgentPose p{neighbor(o.position, opposite(dir)), dir};
                if (!graph.standable(p.position)) continue;
                int dd = dist[graph.index(p)];
                if (dd != kUnreached && (best_dist == kUnreached || dd < best_dist)) {
                    best = &o;
                    best_dist = dd;
                }
            }
        }
        if (best == nullptr) throw Unsatisfiable("no reachable " + describe(d));
        Cell target = best->position;
        walk_to([target](AgentPose p) { return faces_cell(p, target); }, describe(d));
    }

    void free_hands() {
        const GridState& s = state_;
        walk_to([&s](AgentPose p) { return s.is_free(neighbor(p.position, p.direction)); },
                "a free cell to drop " + std::string(to_string(s.carrying->kind)));
        apply(Action::drop);
    }

    void pick_up(Descriptor d) {
        if (state_.carrying) free_hands();
        go_to(d);
        apply(Action::pickup);
    }

    void put_next(Descriptor what, Descriptor where) {
        if (!(state_.carrying && what.matches(*state_.carrying))) pick_up(what);
        const GridState& s = state_;
        auto near_target = [&s, where](AgentPose p) {
            Cell ahead = neighbor(p.position, p.direction);
            if (!s.is_free(ahead)) return false;
            return std::any_of(s.objects.begin(), s.objects.end(), [&](const WorldObject& o) {
                return where.matches(o) && adjacent(o.position, ahead);
            });
        };
        walk_to(near_target, "a free cell next to the " + describe(where));
        apply(Action::drop);
    }

    GridState state_;
    Trajectory trajectory_;
};

} // namespace

Trajectory execute(const Program& prog, const GridState& initial) {
    validate(initial);
    if (prog.commands().empty()) throw Unsatisfiable("empty program");
    Executor ex(initial);
    for (const auto& c : prog.commands()) ex.run(c);
    return std::move(ex).finish();
}

// ---------------------------------------------------------------------------
// Prefix text form

namespace {

std::string prefix_of(const Command& c) {
    auto desc = [](Descriptor d) {
        return std::string(to_string(d.color)) + "," + std::string(to_string(d.kind));
    };
    switch (c.kind) {
    case CommandKind::go_to: return "goto(" + desc(c.object) + ")";
    case CommandKind::pick_up: return "pickup(" + desc(c.object) + ")";
    case CommandKind::put_next: return "putnext(" + desc(c.object) + "," + desc(c.target) + ")";
    }
    return {};
}

class PrefixReader {
public:
    explicit PrefixReader(std::string_view text) {
        std::size_t i = 0;
        while (i < text.size()) {
            unsigned char ch = static_cast<unsigned char>(text[i]);
            if (std::isspace(ch)) {
                ++i;
            } else if (ch == '(' || ch == ')' || ch == ',') {
                tokens_.emplace_back(1, static_cast<char>(ch));
                ++i;
            } else {
                std::size_t j = i;
                while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
                if (j == i) throw ParseError::structural(tokens_.size(), "unexpected character");
                tokens_.emplace_back(text.substr(i, j - i));
                i = j;
            }
        }
    }

    std::vector<Command> program() {
        std::string head = word();
        expect("(");
        std::vector<Command> out;
        if (head == "seq") {
            out = program();
            expect(",");
            auto rest = program();
            out.insert(out.end(), rest.begin(), rest.end());
        } else if (head == "goto") {
            out.push_back(Command::go_to(descriptor()));
        } else if (head == "pickup") {
            out.push_back(Command::pick_up(descriptor()));
        } else if (head == "putnext") {
            Descriptor what = descriptor();
            expect(",");
            out.push_back(Command::put_next(what, descriptor()));
        } else {
            throw ParseError::unknown_token(head, pos_ - 1);
        }
        expect(")");
        return out;
    }

    void finish() const {
        if (pos_ != tokens_.size()) throw ParseError::structural(pos_, "trailing input");
    }

private:
    std::string word() {
        if (pos_ >= tokens_.size()) throw ParseError::structural(pos_, "unexpected end of input");
        return tokens_[pos_++];
    }

    void expect(std::string_view tok) {
        if (pos_ >= tokens_.size() || tokens_[pos_] != tok) {
            throw ParseError::structural(pos_, "expected '" + std::string(tok) + "'");
        }
        ++pos_;
    }

    Descriptor descriptor() {
        std::string c = word();
        auto color = color_from_string(c);
        if (!color) throw ParseError::unknown_token(c, pos_ - 1);
        expect(",");
        std::string k = word();
        auto kind = kind_from_string(k);
        if (!kind) throw ParseError::unknown_token(k, pos_ - 1);
        return {*color, *kind};
    }

    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

std::string to_prefix(const Program& p) {
    auto cmds = p.commands();
    if (cmds.empty()) return {};
    std::string out = prefix_of(cmds.back());
    for (std::size_t i = cmds.size() - 1; i-- > 0;) out = "seq(" + prefix_of(cmds[i]) + ", " + out + ")";
    return out;
}

Program from_prefix(std::string_view text) {
    PrefixReader reader(text);
    auto cmds = reader.program();
    reader.finish();
    return Program(std::move(cmds));
}

} // namespace cfx
