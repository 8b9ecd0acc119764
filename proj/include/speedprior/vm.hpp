#pragma once

// REF-1: the fixed reference monotone machine.
//
// Programs are read from a one-way input tape in 3-bit opcodes, most
// significant bit first, and decoded into a buffer so loops can jump back over
// code that has already been consumed:
//
//   000 INC   001 DEC   010 LEFT  011 RIGHT
//   100 OUT   101 JZ    110 JNZ   111 HALT
//
// The work tape is two-sided and unbounded with 8-bit wrapping cells. OUT
// appends the least significant bit of the current cell to the output tape.
// JZ on a zero cell scans forward past its matching JNZ, fetching as needed;
// every skipped instruction costs one step. JNZ on a non-zero cell jumps to
// just after its matching JZ. A JNZ with no matching JZ is an invalid program.
//
// p computes x (p -> x) iff the first step at which the output extends x
// happens with exactly |p| bits consumed. t(p, x) is that step's index.

#include "speedprior/bitstring.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speedprior::vm {

enum class Op : std::uint8_t { Inc = 0, Dec, Left, Right, Out, Jz, Jnz, Halt };

inline constexpr unsigned kOpcodeBits = 3;

Op decode(unsigned opcode) noexcept;
unsigned encode(Op op) noexcept;
const char* mnemonic(Op op) noexcept;

/// Parses a '0'/'1' program into ops. Trailing bits that do not form a whole
/// opcode are ignored.
std::vector<Op> decode_program(const BitString& program);
BitString encode_program(std::span<const Op> ops);

/// Two-sided unbounded tape of 8-bit cells, all initially zero.
class Tape {
public:
    std::uint8_t get(std::int64_t pos) const noexcept
    {
        const std::int64_t i = pos - base_;
        return (i >= 0 && i < static_cast<std::int64_t>(cells_.size())) ? cells_[static_cast<std::size_t>(i)] : 0;
    }

    std::uint8_t& at(std::int64_t pos);

    /// Allocated window [low(), high()); cells outside it are zero.
    std::int64_t low() const noexcept { return base_; }
    std::int64_t high() const noexcept { return base_ + static_cast<std::int64_t>(cells_.size()); }

    /// Appends a position-independent encoding of the tape as seen from `head`.
    void append_canonical(std::int64_t head, std::string& out) const;
    /// Inverse of append_canonical with the head placed at 0. Advances `in`.
    static Tape from_canonical(std::string_view& in);

    bool all_zero() const noexcept;

private:
    std::vector<std::uint8_t> cells_;
    std::int64_t base_ = 0;
};

enum class RunState : std::uint8_t { Running, Halted, Invalid };

struct MachineState {
    Tape tape;
    std::int64_t head = 0;
    std::vector<Op> program;
    // For a JZ: index of its matching JNZ, or -1 while unmatched. For a JNZ:
    // index of its matching JZ, or -1 if it has none.
    std::vector<std::int32_t> partner;
    std::vector<std::int32_t> open_jz;
    std::size_t ip = 0;
    // > 0 while a JZ is skipping forward; counts unclosed JZs in the skip.
    std::uint32_t scan_depth = 0;
    std::uint64_t consumed_bits = 0;
    BitString output;
    std::uint64_t steps = 0;
    RunState run_state = RunState::Running;

    bool running() const noexcept { return run_state == RunState::Running; }
    bool needs_fetch() const noexcept { return running() && ip == program.size(); }

    /// Appends one decoded instruction to the program buffer (3 input bits).
    void fetch(Op op);

    /// Drops buffered code that can never run again and rebases indices.
    /// Behaviour of the machine is unchanged.
    void trim_dead_code();

    /// Compact position-independent key for a running state; two states with
    /// equal keys (and equal consumed_bits) behave identically from here on.
    /// Without `include_output` only the output length is kept.
    void append_canonical(std::string& out, bool include_output) const;

    /// Rebuilds a state from its key. When the key omits the output, it is
    /// taken as the prefix of `known_output` of the recorded length.
    static MachineState from_canonical(std::string_view key, std::uint64_t consumed_bits, bool output_included,
                                       const BitString& known_output);

private:
    void rebuild_brackets();
};

enum class StepStatus : std::uint8_t { Executed, Jumped, Output, Halted, NeedsMoreInput, InvalidProgram };

/// Executes the instruction at ip (or skips one instruction during a JZ scan).
/// Returns Jumped for a taken JNZ. Precondition: running() && !needs_fetch().
StepStatus execute(MachineState& state);

/// Source of program bits for `step`.
class InputOracle {
public:
    virtual ~InputOracle() = default;
    virtual std::optional<bool> next_bit() = 0;
};

class BitStringOracle final : public InputOracle {
public:
    explicit BitStringOracle(BitString bits) : bits_(std::move(bits)) {}
    std::optional<bool> next_bit() override
    {
        if (pos_ >= bits_.size()) {
            return std::nullopt;
        }
        return bits_[pos_++];
    }
    std::size_t remaining() const noexcept { return bits_.size() - pos_; }

private:
    BitString bits_;
    std::size_t pos_ = 0;
};

struct OutputEvent {
    std::uint64_t consumed_bits = 0;
    BitString output;

    friend bool operator==(const OutputEvent&, const OutputEvent&) = default;
};

struct StepResult {
    StepStatus status = StepStatus::Executed;
    std::optional<OutputEvent> event;
};

/// One step of REF-1: fetches 3 bits from the oracle if the buffer is
/// exhausted, then executes. On NeedsMoreInput the state is left unchanged.
StepResult step(MachineState& state, InputOracle& input);

enum class Verdict : std::uint8_t { Computes, DoesNotCompute, BudgetExhausted };

/// Why a run was decided negatively; informational.
enum class Reason : std::uint8_t {
    None,
    PrintedEarlier,
    Diverged,
    Halted,
    InvalidProgram,
    NeedsMoreInput,
};

struct ComputationResult {
    Verdict verdict = Verdict::BudgetExhausted;
    std::uint64_t steps = 0;  // t(p, x) when verdict == Computes
    Reason reason = Reason::None;

    friend bool operator==(const ComputationResult&, const ComputationResult&) = default;
};

/// Decides p -> x within `budget` steps. Requires budget >= 1 and x nonempty.
ComputationResult computes(const BitString& program, const BitString& x, std::uint64_t budget);

const char* to_string(Verdict v) noexcept;
const char* to_string(Reason r) noexcept;

/// Proves non-termination of silent loops. Feed it every executed step; it
/// reports true once the machine is shown to repeat (possibly translated
/// along the tape) forever without reading input or printing output.
class SilentLoopDetector {
public:
    void reset() noexcept { anchors_.clear(); }

    /// Call after each executed step. `jumped_back` is true when that step
    /// was a taken JNZ.
    bool observe(const MachineState& state, bool jumped_back);

private:
    struct Anchor {
        std::size_t ip = 0;
        std::int64_t head = 0;
        Tape tape;
        std::int64_t min_head = 0;
        std::int64_t max_head = 0;
        std::uint64_t visits = 0;
        std::uint64_t period = 1;
    };

    static bool repeats_forever(const Anchor& a, const MachineState& s);

    std::vector<Anchor> anchors_;
};

}  // namespace speedprior::vm
