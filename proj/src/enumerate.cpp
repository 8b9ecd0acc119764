#include "speedprior/enumerate.hpp"

#include "speedprior/search.hpp"
#include "speedprior/vm.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <thread>

namespace speedprior::enumerate {

namespace {

struct RunOutcome {
    std::vector<ComputationRecord> records;
    std::uint64_t executed = 0;
};

// Runs one program with input exactly `program` and records every output
// event that happens with the whole program consumed.
void run_program(const BitString& program, std::uint64_t budget, RunOutcome& out)
{
    vm::MachineState s;
    vm::BitStringOracle input(program);
    while (s.steps < budget) {
        if (s.needs_fetch() && input.remaining() < vm::kOpcodeBits) {
            return;
        }
        const vm::StepResult r = vm::step(s, input);
        ++out.executed;
        if (r.status == vm::StepStatus::Output && s.consumed_bits == program.size()) {
            out.records.push_back({program, s.output, s.steps, first_phase(program.size(), s.steps)});
        }
        if (!s.running() || r.status == vm::StepStatus::NeedsMoreInput) {
            return;
        }
    }
}

std::vector<ComputationRecord> enumerate_naive(int k, std::uint64_t& allotted, std::uint64_t& executed)
{
    std::set<ComputationRecord> found;
    for (int phase = 1; phase <= k; ++phase) {
        for (int len = 1; len <= phase; ++len) {
            const std::uint64_t budget = std::uint64_t{1} << (phase - len);
            const std::uint64_t count = std::uint64_t{1} << len;
            allotted += count * budget;
            for (std::uint64_t code = 0; code < count; ++code) {
                BitString program;
                for (int b = len - 1; b >= 0; --b) {
                    program.push_back(((code >> b) & 1U) != 0);
                }
                RunOutcome run;
                run_program(program, budget, run);
                executed += run.executed;
                found.insert(run.records.begin(), run.records.end());
            }
        }
    }
    return {found.begin(), found.end()};
}

class TreeWalker {
public:
    explicit TreeWalker(int k) : k_(k) {}

    // Explores the subtree below `s`, whose consumed bits are `prefix`.
    void walk(vm::MachineState& s, BitString& prefix)
    {
        const auto c = static_cast<int>(s.consumed_bits);
        const std::uint64_t budget = std::uint64_t{1} << (k_ - c);
        while (s.running()) {
            if (s.needs_fetch()) {
                if (c + static_cast<int>(vm::kOpcodeBits) > k_) {
                    return;
                }
                const std::uint64_t child_budget = budget >> vm::kOpcodeBits;
                if (s.steps + 1 > child_budget) {
                    return;
                }
                for (unsigned code = 0; code < 8; ++code) {
                    vm::MachineState child = s;
                    child.fetch(vm::decode(code));
                    push_code(prefix, code);
                    walk(child, prefix);
                    for (unsigned i = 0; i < vm::kOpcodeBits; ++i) {
                        prefix.pop_back();
                    }
                }
                return;
            }
            if (s.steps >= budget) {
                return;
            }
            const vm::StepStatus status = vm::execute(s);
            ++executed;
            if (status == vm::StepStatus::Output) {
                records.push_back({prefix, s.output, s.steps, first_phase(prefix.size(), s.steps)});
            }
        }
    }

    static void push_code(BitString& prefix, unsigned code)
    {
        prefix.push_back((code & 4U) != 0);
        prefix.push_back((code & 2U) != 0);
        prefix.push_back((code & 1U) != 0);
    }

    std::vector<ComputationRecord> records;
    std::uint64_t executed = 0;

private:
    int k_;
};

std::vector<ComputationRecord> enumerate_tree(int k, unsigned workers, std::uint64_t& executed)
{
    // The root needs a fetch before its first step, so the work splits
    // cleanly into the eight first-opcode subtrees.
    std::vector<ComputationRecord> records;
    if (k < static_cast<int>(vm::kOpcodeBits)) {
        return records;
    }
    std::vector<TreeWalker> walkers(8, TreeWalker(k));
    auto work = [&walkers](unsigned code) {
        vm::MachineState s;
        s.fetch(vm::decode(code));
        BitString prefix;
        TreeWalker::push_code(prefix, code);
        walkers[code].walk(s, prefix);
    };
    workers = std::clamp(workers, 1U, 8U);
    if (workers == 1) {
        for (unsigned code = 0; code < 8; ++code) {
            work(code);
        }
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&work, w, workers] {
                for (unsigned code = w; code < 8; code += workers) {
                    work(code);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (auto& w : walkers) {
        executed += w.executed;
        records.insert(records.end(), w.records.begin(), w.records.end());
    }
    std::sort(records.begin(), records.end());
    return records;
}

}  // namespace

std::vector<ComputationRecord> ComputationLedger::records_for(const BitString& x) const
{
    std::vector<ComputationRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&x](const ComputationRecord& r) { return r.output == x; });
    return out;
}

PhaseCapExceeded::PhaseCapExceeded(int requested, int cap)
    : std::runtime_error("phase " + std::to_string(requested) + " requested but the cap is " + std::to_string(cap) +
                         "; refused at phase " + std::to_string(cap + 1))
    , phase_(cap + 1)
{
}

ComputationLedger enumerate_up_to_phase(int k, Mode mode, const EnumerationOptions& options)
{
    if (k < 1) {
        throw std::invalid_argument("phase must be at least 1");
    }
    if (k > options.phase_cap) {
        throw PhaseCapExceeded(k, options.phase_cap);
    }
    if (k > 62) {
        throw PhaseCapExceeded(k, 62);
    }
    ComputationLedger ledger;
    ledger.max_phase = k;
    ledger.mode = mode;
    if (mode == Mode::Naive) {
        std::uint64_t allotted = 0;
        ledger.records = enumerate_naive(k, allotted, ledger.executed_steps);
        ledger.naive_step_count = allotted;
    } else {
        ledger.records = enumerate_tree(k, options.workers, ledger.executed_steps);
    }
    return ledger;
}

int first_phase(std::uint64_t program_length, std::uint64_t time)
{
    if (time == 0) {
        throw std::invalid_argument("time must be at least 1");
    }
    // Least e with time <= 2^e.
    const int e = time == 1 ? 0 : static_cast<int>(std::bit_width(time - 1));
    return static_cast<int>(program_length) + e;
}

std::uint64_t fast_step_formula(int k)
{
    if (k < 1 || k > 57) {
        throw std::invalid_argument("k out of range");
    }
    return (std::uint64_t{1} << (k + 1)) * static_cast<std::uint64_t>(k - 1) + 2;
}

const char* to_string(Exactness e) noexcept
{
    return e == Exactness::Exact ? "exact" : "lowerBoundOnly";
}

double KtValue::approx() const
{
    if (status != Exactness::Exact) {
        return static_cast<double>(lower_bound);
    }
    return static_cast<double>(program_length) + std::log2(static_cast<double>(time));
}

namespace {

// Whether |a| + log2 t_a < |b| + log2 t_b, i.e. 2^|a| t_a < 2^|b| t_b.
bool cheaper(std::uint64_t la, std::uint64_t ta, std::uint64_t lb, std::uint64_t tb)
{
    const std::uint64_t m = std::min(la, lb);
    return (static_cast<unsigned __int128>(ta) << (la - m)) < (static_cast<unsigned __int128>(tb) << (lb - m));
}

}  // namespace

KtValue kt_complexity(const BitString& x, int k_max)
{
    if (x.empty()) {
        throw std::invalid_argument("x must be nonempty");
    }
    KtValue best;
    best.lower_bound = std::max(k_max, 0);
    if (k_max <= 0) {
        return best;
    }
    const auto result = search::explore(search::Budget::phase(k_max), search::Filter::along(x));
    bool found = false;
    for (const auto& c : result.computations(x)) {
        if (!found || cheaper(c.program_length, c.time, best.program_length, best.time)) {
            best.program_length = c.program_length;
            best.time = c.time;
            found = true;
        }
    }
    if (found) {
        best.status = Exactness::Exact;
        best.lower_bound = first_phase(best.program_length, best.time) - 1;
    }
    return best;
}

KmValue km_complexity(const BitString& x, int k_max)
{
    if (x.empty()) {
        throw std::invalid_argument("x must be nonempty");
    }
    KmValue value;
    if (k_max <= 0) {
        return value;
    }
    const std::uint64_t budget = std::uint64_t{1} << std::min(k_max, 62);
    const auto filter = search::Filter::along(x);
    std::uint64_t limit = vm::kOpcodeBits;
    for (std::uint64_t m = vm::kOpcodeBits; m <= static_cast<std::uint64_t>(k_max); m += vm::kOpcodeBits) {
        const auto result = search::explore(search::Budget::uniform(budget, m), filter);
        std::uint64_t unresolved = m + vm::kOpcodeBits;
        for (const auto& f : result.frontier()) {
            if (f.consumed < m) {
                unresolved = std::min<std::uint64_t>(unresolved, f.consumed);
            }
        }
        const auto& found = result.computations(x);
        if (!found.empty()) {
            value.length = found.front().program_length;
            value.status = unresolved < value.length ? Exactness::LowerBoundOnly : Exactness::Exact;
            if (value.status == Exactness::LowerBoundOnly) {
                value.length = unresolved;
            }
            return value;
        }
        limit = unresolved;
        if (unresolved < m) {
            break;
        }
    }
    value.length = limit;
    return value;
}

IncomputablePrefixes incomputable_prefix_set(std::uint64_t t, std::size_t max_len)
{
    if (t == 0) {
        throw std::invalid_argument("t must be at least 1");
    }
    IncomputablePrefixes out;
    if (max_len == 0) {
        return out;
    }
    // Every step after the first fetch executes an instruction, so a program
    // printing within t steps has consumed at most 3t bits.
    const auto result =
        search::explore(search::Budget::uniform(t, vm::kOpcodeBits * t), search::Filter::all_up_to(max_len));
    const auto& computable = result.all_computations();
    auto is_computable = [&computable](const BitString& y) { return computable.count(y) != 0; };
    for (std::size_t len = 1; len <= max_len; ++len) {
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
            BitString y;
            for (std::size_t b = len; b-- > 0;) {
                y.push_back(((code >> b) & 1U) != 0);
            }
            if (is_computable(y)) {
                continue;
            }
            bool prefixes_ok = true;
            for (std::size_t n = 1; n < len && prefixes_ok; ++n) {
                prefixes_ok = is_computable(y.prefix(n));
            }
            (prefixes_ok ? out.minimal : out.never_printed).push_back(y);
        }
    }
    return out;
}

std::string to_json_lines(const ComputationLedger& ledger)
{
    std::string out;
    for (const auto& r : ledger.records) {
        nlohmann::ordered_json j;
        j["program"] = r.program.text();
        j["output"] = r.output.text();
        j["time"] = r.time;
        j["firstPhase"] = r.first_phase;
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace speedprior::enumerate
