#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfx/gridworld.hpp"

namespace cfx {

/// Longest command sequence the program space (and the grammar) can express.
/// Larger depth bounds are clamped to this.
inline constexpr int kMaxCommands = 2;
inline constexpr int kDefaultDepth = 2;

struct Descriptor {
    Color color = Color::blue;
    ObjectKind kind = ObjectKind::ball;

    bool matches(const WorldObject& o) const { return o.color == color && o.kind == kind; }

    friend auto operator<=>(const Descriptor&, const Descriptor&) = default;
};

inline constexpr std::size_t kDescriptorCount = 18;

std::size_t descriptor_index(Descriptor d);
Descriptor descriptor_at(std::size_t index);

enum class CommandKind : std::uint8_t { go_to, pick_up, put_next };

/// One atomic command. `target` is only meaningful for put_next.
struct Command {
    CommandKind kind = CommandKind::go_to;
    Descriptor object;
    Descriptor target;

    static Command go_to(Descriptor d) { return {CommandKind::go_to, d, {}}; }
    static Command pick_up(Descriptor d) { return {CommandKind::pick_up, d, {}}; }
    static Command put_next(Descriptor what, Descriptor where) {
        return {CommandKind::put_next, what, where};
    }

    friend bool operator==(const Command& a, const Command& b) {
        return a.kind == b.kind && a.object == b.object &&
               (a.kind != CommandKind::put_next || a.target == b.target);
    }
};

/// Number of distinct atomic commands: 18 go_to + 18 pick_up + 18*18 put_next.
inline constexpr std::size_t kAtomicCount = 2 * kDescriptorCount + kDescriptorCount * kDescriptorCount;

std::size_t atomic_index(const Command& c);
Command atomic_at(std::size_t index);

/// A program is a non-empty sequence of atomic commands. A single command is
/// an atomic program; longer sequences are the flattened form of Seq, which
/// is associative under the ordered-witness semantics.
class Program {
public:
    Program() = default;
    explicit Program(Command c) : commands_{c} {}
    explicit Program(std::vector<Command> commands);

    static Program go_to(Descriptor d) { return Program(Command::go_to(d)); }
    static Program pick_up(Descriptor d) { return Program(Command::pick_up(d)); }
    static Program put_next(Descriptor what, Descriptor where) {
        return Program(Command::put_next(what, where));
    }
    static Program seq(const Program& first, const Program& second);

    std::span<const Command> commands() const { return commands_; }
    std::size_t depth() const { return commands_.size(); }
    bool is_atomic() const { return commands_.size() == 1; }

    friend bool operator==(const Program&, const Program&) = default;

private:
    std::vector<Command> commands_;
};

using ProgramSet = std::vector<Program>;

int clamp_depth(int depth_bound);

/// Position of `p` in the canonical enumeration (atomic tier first).
std::size_t canonical_index(const Program& p);
Program program_at(std::size_t index);
std::size_t program_count(int depth_bound);

/// All programs with at most depth_bound commands, in canonical order.
ProgramSet enumerate_programs(int depth_bound);

/// Goal predicate over a replayed state sequence; see README for the event
/// semantics of each command.
bool satisfied(const Program& prog, std::span<const GridState> states);

/// Programs of enumerate_programs(depth_bound) satisfied by the replay of
/// `traj`, canonical order preserved. Propagates InvalidTrajectory.
ProgramSet consistent_set(const Trajectory& traj, int depth_bound);

/// Canonical indices of consistent_set(traj, depth_bound), ascending.
std::vector<std::size_t> consistent_indices(std::span<const GridState> states, int depth_bound);

/// Deterministic plan whose replay satisfies `prog`. Throws Unsatisfiable.
Trajectory execute(const Program& prog, const GridState& initial);

/// Prefix text form, e.g. `seq(pickup(green,key), putnext(yellow,box,grey,ball))`.
std::string to_prefix(const Program& p);
/// Inverse of to_prefix; whitespace-insensitive. Throws ParseError.
Program from_prefix(std::string_view text);

} // namespace cfx
