#include "oracle/ref1_oracle.hpp"

#include "speedprior/predictor.hpp"
#include "speedprior/vm.hpp"

#include <doctest.h>

#include <set>

using namespace speedprior;
using vm::Verdict;

namespace {

std::vector<std::string> programs_up_to(std::size_t max_len)
{
    std::vector<std::string> out;
    for (std::size_t len = 3; len <= max_len; len += 3) {
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
            out.push_back(oracle::bits(code, len));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("opcode table round-trips")
{
    for (unsigned code = 0; code < 8; ++code) {
        CHECK(vm::encode(vm::decode(code)) == code);
    }
    CHECK(std::string(vm::mnemonic(vm::decode(4))) == "OUT");
    const auto ops = vm::decode_program(BitString("000100111"));
    REQUIRE(ops.size() == 3);
    CHECK(ops[0] == vm::Op::Inc);
    CHECK(ops[1] == vm::Op::Out);
    CHECK(ops[2] == vm::Op::Halt);
    CHECK(vm::encode_program(ops) == BitString("000100111"));
}

TEST_CASE("single step fetches OUT and prints 0")
{
    vm::MachineState s;
    vm::BitStringOracle in(BitString("100"));
    const auto r = vm::step(s, in);
    CHECK(r.status == vm::StepStatus::Output);
    REQUIRE(r.event);
    CHECK(*r.event == vm::OutputEvent{3, BitString("0")});
    CHECK(s.steps == 1);
}

TEST_CASE("INC then OUT prints 1 after six bits")
{
    vm::MachineState s;
    vm::BitStringOracle in(BitString("000100"));
    CHECK(vm::step(s, in).status == vm::StepStatus::Executed);
    const auto r = vm::step(s, in);
    REQUIRE(r.event);
    CHECK(*r.event == vm::OutputEvent{6, BitString("1")});
    CHECK(s.steps == 2);
}

TEST_CASE("stepping without input leaves the state alone")
{
    vm::MachineState s;
    vm::BitStringOracle in(BitString("10"));
    CHECK(vm::step(s, in).status == vm::StepStatus::NeedsMoreInput);
    CHECK(s.steps == 0);
    CHECK(s.consumed_bits == 0);
}

TEST_CASE("computes: worked examples")
{
    CHECK(vm::computes(BitString("100"), BitString("0"), 10) == vm::ComputationResult{Verdict::Computes, 1, vm::Reason::None});
    CHECK(vm::computes(BitString("100111"), BitString("0"), 10).verdict == Verdict::DoesNotCompute);
    CHECK(vm::computes(BitString("100111"), BitString("0"), 10).reason == vm::Reason::PrintedEarlier);
    const auto r = vm::computes(BitString("000100"), BitString("1"), 10);
    CHECK(r.verdict == Verdict::Computes);
    CHECK(r.steps == 2);
    CHECK(vm::computes(BitString("100"), BitString("1"), 10).verdict == Verdict::DoesNotCompute);
}

TEST_CASE("JZ scan and JNZ loop step accounting")
{
    // JZ on a zero cell skips INC and the JNZ, then OUT: 1 + 2 + 1 steps.
    CHECK(vm::computes(BitString("101000110100"), BitString("0"), 100).steps == 4);
    // INC INC JZ DEC JNZ OUT: the loop body runs twice.
    const BitString countdown("000000101001110100");
    const auto r = vm::computes(countdown, BitString("0"), 100);
    CHECK(r.verdict == Verdict::Computes);
    CHECK(r.steps == 2 + 1 + 2 + 2 + 1);
    CHECK(oracle::computes(countdown.text(), "0", 100) == r.steps);
}

TEST_CASE("unmatched JNZ is invalid once executed")
{
    const auto r = vm::computes(BitString("000110100"), BitString("1"), 100);
    CHECK(r.verdict == Verdict::DoesNotCompute);
    CHECK(r.reason == vm::Reason::InvalidProgram);
}

TEST_CASE("computes agrees with the reference interpreter on every program up to 12 bits")
{
    const std::uint64_t budget = 40;
    std::size_t checked = 0;
    for (const auto& p : programs_up_to(12)) {
        std::set<std::string> printed;
        for (const auto& pr : oracle::run(p, budget)) {
            printed.insert(pr.output);
        }
        for (const std::string& x : {"0", "1", "00", "01", "10", "11", "010"}) {
            printed.insert(x);
        }
        for (const auto& x : printed) {
            const auto mine = vm::computes(BitString(p), BitString(x), budget);
            const auto ref = oracle::computes(p, x, budget);
            CHECK_MESSAGE((mine.verdict == Verdict::Computes) == ref.has_value(), p << " -> " << x);
            if (ref) {
                CHECK(mine.steps == *ref);
            }
            ++checked;
        }
    }
    CHECK(checked > 4680);
}

TEST_CASE("programs computing the same string form a prefix-free set")
{
    std::map<std::string, std::vector<std::string>> by_output;
    for (const auto& p : programs_up_to(12)) {
        for (const auto& pr : oracle::run(p, 64)) {
            if (vm::computes(BitString(p), BitString(pr.output), 64).verdict == Verdict::Computes) {
                by_output[pr.output].push_back(p);
            }
        }
    }
    for (const auto& [x, progs] : by_output) {
        for (const auto& a : progs) {
            for (const auto& b : progs) {
                if (a != b) {
                    CHECK_FALSE(BitString(a).is_prefix_of(BitString(b)));
                }
            }
        }
    }
}

TEST_CASE("determinism, budget monotonicity and the chain property")
{
    predictor::SplitMix64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t len = 3 * (1 + rng.next() % 6);
        std::string p = oracle::bits(rng.next(), len);
        const auto prints = oracle::run(p, 200);
        if (prints.empty()) {
            continue;
        }
        const std::string x = prints.back().output;
        const auto a = vm::computes(BitString(p), BitString(x), 200);
        CHECK(a == vm::computes(BitString(p), BitString(x), 200));
        if (a.verdict != Verdict::Computes) {
            continue;
        }
        CHECK(vm::computes(BitString(p), BitString(x), 1000) == a);
        CHECK(vm::computes(BitString(p), BitString(x), a.steps) == a);
        // Every prefix of x is computed by a prefix of p, no later.
        for (std::size_t m = 1; m < x.size(); ++m) {
            bool found = false;
            for (std::size_t l = 3; l <= p.size() && !found; l += 3) {
                const auto r = vm::computes(BitString(p.substr(0, l)), BitString(x.substr(0, m)), 200);
                found = r.verdict == Verdict::Computes && r.steps <= a.steps;
            }
            CHECK_MESSAGE(found, p << " prefix " << x.substr(0, m));
        }
    }
}

TEST_CASE("canonical keys round-trip through from_canonical")
{
    predictor::SplitMix64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const BitString p(oracle::bits(rng.next(), 3 * (1 + rng.next() % 8)));
        vm::MachineState s;
        vm::BitStringOracle in(p);
        const std::uint64_t steps = rng.next() % 30;
        for (std::uint64_t i = 0; i < steps && s.running(); ++i) {
            if (vm::step(s, in).status == vm::StepStatus::NeedsMoreInput) {
                break;
            }
        }
        if (!s.running()) {
            continue;
        }
        for (const bool with_output : {false, true}) {
            std::string key;
            s.append_canonical(key, with_output);
            const auto back = vm::MachineState::from_canonical(key, s.consumed_bits, with_output, s.output);
            std::string again;
            back.append_canonical(again, with_output);
            CHECK(again == key);
            CHECK(back.output == s.output);
        }
    }
}

TEST_CASE("silent loop detector")
{
    auto detects = [](const char* program, int max_steps) {
        vm::MachineState s;
        vm::BitStringOracle in{BitString(program)};
        vm::SilentLoopDetector d;
        for (int i = 0; i < max_steps; ++i) {
            const auto r = vm::step(s, in);
            if (r.status == vm::StepStatus::NeedsMoreInput || !s.running()) {
                return false;
            }
            if (d.observe(s, r.status == vm::StepStatus::Jumped)) {
                return true;
            }
        }
        return false;
    };
    // INC JZ JNZ spins on a non-zero cell.
    CHECK(detects("000101110", 200));
    // INC JZ RIGHT INC JNZ walks right forever.
    CHECK(detects("000101011000110", 500));
    // A countdown leaves its loop.
    CHECK_FALSE(detects("000000101001110100", 200));
}
