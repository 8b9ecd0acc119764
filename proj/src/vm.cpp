#include "speedprior/vm.hpp"

#include <algorithm>
#include <cstring>

namespace speedprior::vm {

Op decode(unsigned opcode) noexcept { return static_cast<Op>(opcode & 7U); }

unsigned encode(Op op) noexcept { return static_cast<unsigned>(op); }

const char* mnemonic(Op op) noexcept
{
    switch (op) {
    case Op::Inc: return "INC";
    case Op::Dec: return "DEC";
    case Op::Left: return "LEFT";
    case Op::Right: return "RIGHT";
    case Op::Out: return "OUT";
    case Op::Jz: return "JZ";
    case Op::Jnz: return "JNZ";
    case Op::Halt: return "HALT";
    }
    return "?";
}

std::vector<Op> decode_program(const BitString& program)
{
    std::vector<Op> ops;
    for (std::size_t i = 0; i + kOpcodeBits <= program.size(); i += kOpcodeBits) {
        const unsigned code = (program[i] ? 4U : 0U) | (program[i + 1] ? 2U : 0U) | (program[i + 2] ? 1U : 0U);
        ops.push_back(decode(code));
    }
    return ops;
}

BitString encode_program(std::span<const Op> ops)
{
    BitString bits;
    for (Op op : ops) {
        const unsigned code = encode(op);
        bits.push_back((code & 4U) != 0);
        bits.push_back((code & 2U) != 0);
        bits.push_back((code & 1U) != 0);
    }
    return bits;
}

// ---------------------------------------------------------------------------
// Tape

std::uint8_t& Tape::at(std::int64_t pos)
{
    if (cells_.empty()) {
        base_ = pos;
        cells_.assign(1, 0);
        return cells_[0];
    }
    if (pos < base_) {
        const auto need = static_cast<std::size_t>(base_ - pos);
        const std::size_t grow = std::max(need, cells_.size());
        cells_.insert(cells_.begin(), grow, 0);
        base_ -= static_cast<std::int64_t>(grow);
    } else if (pos >= high()) {
        const auto need = static_cast<std::size_t>(pos - high() + 1);
        cells_.resize(cells_.size() + std::max(need, cells_.size()), 0);
    }
    return cells_[static_cast<std::size_t>(pos - base_)];
}

bool Tape::all_zero() const noexcept
{
    return std::all_of(cells_.begin(), cells_.end(), [](std::uint8_t c) { return c == 0; });
}

namespace {

void put_varint(std::string& out, std::uint64_t v)
{
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7F) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

std::uint64_t get_varint(std::string_view& in)
{
    std::uint64_t v = 0;
    for (unsigned shift = 0;; shift += 7) {
        const auto byte = static_cast<unsigned char>(in.front());
        in.remove_prefix(1);
        v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
        if ((byte & 0x80) == 0) {
            return v;
        }
    }
}

std::uint64_t zigzag(std::int64_t v) { return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63); }

std::int64_t unzigzag(std::uint64_t v) { return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1); }

}  // namespace

void Tape::append_canonical(std::int64_t head, std::string& out) const
{
    std::size_t first = 0;
    std::size_t last = cells_.size();
    while (first < last && cells_[first] == 0) {
        ++first;
    }
    while (last > first && cells_[last - 1] == 0) {
        --last;
    }
    const std::size_t len = last - first;
    put_varint(out, len);
    if (len == 0) {
        return;
    }
    put_varint(out, zigzag(head - (base_ + static_cast<std::int64_t>(first))));
    out.append(reinterpret_cast<const char*>(cells_.data()) + first, len);
}

Tape Tape::from_canonical(std::string_view& in)
{
    Tape tape;
    const std::size_t len = get_varint(in);
    if (len == 0) {
        return tape;
    }
    tape.base_ = -unzigzag(get_varint(in));
    tape.cells_.assign(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(len));
    in.remove_prefix(len);
    return tape;
}

// ---------------------------------------------------------------------------
// MachineState

void MachineState::fetch(Op op)
{
    const auto index = static_cast<std::int32_t>(program.size());
    program.push_back(op);
    partner.push_back(-1);
    if (op == Op::Jz) {
        open_jz.push_back(index);
    } else if (op == Op::Jnz && !open_jz.empty()) {
        const std::int32_t jz = open_jz.back();
        open_jz.pop_back();
        partner[static_cast<std::size_t>(jz)] = index;
        partner.back() = jz;
    }
    consumed_bits += kOpcodeBits;
}

void MachineState::trim_dead_code()
{
    std::size_t live = ip;
    if (!open_jz.empty()) {
        live = std::min(live, static_cast<std::size_t>(open_jz.front()));
    }
    // A JNZ that may still execute keeps its JZ alive; iterate to a fixpoint.
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t j = live; j < program.size(); ++j) {
            if (program[j] == Op::Jnz && partner[j] >= 0 && static_cast<std::size_t>(partner[j]) < live) {
                live = static_cast<std::size_t>(partner[j]);
                changed = true;
            }
        }
    }
    if (live == 0) {
        return;
    }
    const auto shift = static_cast<std::int32_t>(live);
    program.erase(program.begin(), program.begin() + static_cast<std::ptrdiff_t>(live));
    partner.erase(partner.begin(), partner.begin() + static_cast<std::ptrdiff_t>(live));
    for (auto& p : partner) {
        if (p >= 0) {
            p -= shift;
        }
    }
    for (auto& j : open_jz) {
        j -= shift;
    }
    ip -= live;
}

void MachineState::append_canonical(std::string& out, bool include_output) const
{
    put_varint(out, steps);
    put_varint(out, ip);
    put_varint(out, scan_depth);
    put_varint(out, program.size());
    for (std::size_t i = 0; i < program.size(); i += 2) {
        unsigned byte = static_cast<unsigned>(program[i]);
        if (i + 1 < program.size()) {
            byte |= static_cast<unsigned>(program[i + 1]) << 4U;
        }
        out.push_back(static_cast<char>(byte));
    }
    put_varint(out, output.size());
    if (include_output) {
        for (std::size_t i = 0; i < output.size(); i += 8) {
            unsigned byte = 0;
            for (std::size_t j = i; j < std::min(i + 8, output.size()); ++j) {
                byte |= (output[j] ? 1U : 0U) << (j - i);
            }
            out.push_back(static_cast<char>(byte));
        }
    }
    tape.append_canonical(head, out);
}

MachineState MachineState::from_canonical(std::string_view key, std::uint64_t consumed, bool output_included,
                                          const BitString& known_output)
{
    MachineState s;
    s.steps = get_varint(key);
    s.ip = get_varint(key);
    s.scan_depth = static_cast<std::uint32_t>(get_varint(key));
    const std::size_t n = get_varint(key);
    s.program.resize(n);
    for (std::size_t i = 0; i < n; i += 2) {
        const auto byte = static_cast<unsigned char>(key[i / 2]);
        s.program[i] = decode(byte & 0x0FU);
        if (i + 1 < n) {
            s.program[i + 1] = decode(byte >> 4U);
        }
    }
    key.remove_prefix((n + 1) / 2);
    const std::size_t out_len = get_varint(key);
    if (output_included) {
        for (std::size_t i = 0; i < out_len; ++i) {
            s.output.push_back(((static_cast<unsigned char>(key[i / 8]) >> (i % 8)) & 1U) != 0);
        }
        key.remove_prefix((out_len + 7) / 8);
    } else {
        s.output = known_output.prefix(out_len);
    }
    s.tape = Tape::from_canonical(key);
    s.consumed_bits = consumed;
    s.rebuild_brackets();
    return s;
}

void MachineState::rebuild_brackets()
{
    partner.assign(program.size(), -1);
    open_jz.clear();
    for (std::size_t i = 0; i < program.size(); ++i) {
        const auto index = static_cast<std::int32_t>(i);
        if (program[i] == Op::Jz) {
            open_jz.push_back(index);
        } else if (program[i] == Op::Jnz && !open_jz.empty()) {
            partner[i] = open_jz.back();
            partner[static_cast<std::size_t>(open_jz.back())] = index;
            open_jz.pop_back();
        }
    }
}

// ---------------------------------------------------------------------------
// Execution

StepStatus execute(MachineState& s)
{
    ++s.steps;
    const Op op = s.program[s.ip];
    if (s.scan_depth > 0) {
        if (op == Op::Jz) {
            ++s.scan_depth;
        } else if (op == Op::Jnz) {
            --s.scan_depth;
        }
        ++s.ip;
        return StepStatus::Executed;
    }
    switch (op) {
    case Op::Inc:
        ++s.tape.at(s.head);
        break;
    case Op::Dec:
        --s.tape.at(s.head);
        break;
    case Op::Left:
        --s.head;
        break;
    case Op::Right:
        ++s.head;
        break;
    case Op::Out:
        s.output.push_back((s.tape.get(s.head) & 1U) != 0);
        ++s.ip;
        return StepStatus::Output;
    case Op::Jz:
        if (s.tape.get(s.head) == 0) {
            s.scan_depth = 1;
        }
        break;
    case Op::Jnz: {
        const std::int32_t jz = s.partner[s.ip];
        if (jz < 0) {
            s.run_state = RunState::Invalid;
            return StepStatus::InvalidProgram;
        }
        if (s.tape.get(s.head) != 0) {
            s.ip = static_cast<std::size_t>(jz) + 1;
            return StepStatus::Jumped;
        }
        break;
    }
    case Op::Halt:
        s.run_state = RunState::Halted;
        return StepStatus::Halted;
    }
    ++s.ip;
    return StepStatus::Executed;
}

StepResult step(MachineState& state, InputOracle& input)
{
    if (!state.running()) {
        return {state.run_state == RunState::Halted ? StepStatus::Halted : StepStatus::InvalidProgram, {}};
    }
    if (state.needs_fetch()) {
        unsigned code = 0;
        for (unsigned i = 0; i < kOpcodeBits; ++i) {
            const auto bit = input.next_bit();
            if (!bit) {
                return {StepStatus::NeedsMoreInput, {}};
            }
            code = (code << 1U) | (*bit ? 1U : 0U);
        }
        state.fetch(decode(code));
    }
    StepResult result{execute(state), {}};
    if (result.status == StepStatus::Output) {
        result.event = OutputEvent{state.consumed_bits, state.output};
    }
    return result;
}

ComputationResult computes(const BitString& program, const BitString& x, std::uint64_t budget)
{
    MachineState s;
    BitStringOracle input(program);
    while (true) {
        if (s.steps >= budget) {
            return {Verdict::BudgetExhausted, s.steps, Reason::None};
        }
        if (s.needs_fetch() && input.remaining() < kOpcodeBits) {
            return {Verdict::DoesNotCompute, s.steps, Reason::NeedsMoreInput};
        }
        const StepResult r = step(s, input);
        switch (r.status) {
        case StepStatus::Output: {
            const std::size_t n = s.output.size();
            if (s.output[n - 1] != x[n - 1]) {
                return {Verdict::DoesNotCompute, s.steps, Reason::Diverged};
            }
            if (n == x.size()) {
                if (s.consumed_bits == program.size()) {
                    return {Verdict::Computes, s.steps, Reason::None};
                }
                return {Verdict::DoesNotCompute, s.steps, Reason::PrintedEarlier};
            }
            break;
        }
        case StepStatus::Halted:
            return {Verdict::DoesNotCompute, s.steps, Reason::Halted};
        case StepStatus::InvalidProgram:
            return {Verdict::DoesNotCompute, s.steps, Reason::InvalidProgram};
        case StepStatus::NeedsMoreInput:
            return {Verdict::DoesNotCompute, s.steps, Reason::NeedsMoreInput};
        case StepStatus::Executed:
        case StepStatus::Jumped:
            break;
        }
    }
}

const char* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::Computes: return "computes";
    case Verdict::DoesNotCompute: return "doesNotCompute";
    case Verdict::BudgetExhausted: return "budgetExhausted";
    }
    return "?";
}

const char* to_string(Reason r) noexcept
{
    switch (r) {
    case Reason::None: return "none";
    case Reason::PrintedEarlier: return "printedEarlier";
    case Reason::Diverged: return "diverged";
    case Reason::Halted: return "halted";
    case Reason::InvalidProgram: return "invalidProgram";
    case Reason::NeedsMoreInput: return "needsMoreInput";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Silent loop detection

bool SilentLoopDetector::repeats_forever(const Anchor& a, const MachineState& s)
{
    // Between the anchor and now the machine neither read nor printed, and
    // touched only cells in [min_head, max_head]. If the part of the tape that
    // segment depends on reappears (shifted by the head displacement), the
    // segment replays forever.
    const std::int64_t d = s.head - a.head;
    if (d == 0) {
        for (std::int64_t q = a.min_head; q <= a.max_head; ++q) {
            if (s.tape.get(q) != a.tape.get(q)) {
                return false;
            }
        }
        return true;
    }
    if (d > 0) {
        const std::int64_t hi = std::max(a.tape.high(), s.tape.high() - d);
        for (std::int64_t q = a.min_head; q < hi; ++q) {
            if (s.tape.get(q + d) != a.tape.get(q)) {
                return false;
            }
        }
        return true;
    }
    const std::int64_t lo = std::min(a.tape.low(), s.tape.low() - d);
    for (std::int64_t q = a.max_head; q >= lo; --q) {
        if (s.tape.get(q + d) != a.tape.get(q)) {
            return false;
        }
    }
    return true;
}

bool SilentLoopDetector::observe(const MachineState& s, bool jumped_back)
{
    for (auto& a : anchors_) {
        a.min_head = std::min(a.min_head, s.head);
        a.max_head = std::max(a.max_head, s.head);
    }
    if (!jumped_back) {
        return false;
    }
    auto it = std::find_if(anchors_.begin(), anchors_.end(), [&](const Anchor& a) { return a.ip == s.ip; });
    if (it == anchors_.end()) {
        if (anchors_.size() < 16) {
            anchors_.push_back(Anchor{s.ip, s.head, s.tape, s.head, s.head, 0, 1});
        }
        return false;
    }
    Anchor& a = *it;
    ++a.visits;
    if (repeats_forever(a, s)) {
        return true;
    }
    if (a.visits >= a.period) {
        a.head = s.head;
        a.tape = s.tape;
        a.min_head = s.head;
        a.max_head = s.head;
        a.visits = 0;
        a.period *= 2;
    }
    return false;
}

}  // namespace speedprior::vm
