#include "speedprior/search.hpp"

#include "speedprior/vm.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace speedprior::search {

Budget Budget::phase(int k)
{
    if (k < 0 || k > 62) {
        throw std::invalid_argument("phase must lie in [0, 62]");
    }
    Budget b;
    b.phase_ = k;
    return b;
}

Budget Budget::uniform(std::uint64_t steps, std::uint64_t max_consumed)
{
    Budget b;
    b.steps_ = steps;
    b.max_consumed_ = max_consumed;
    return b;
}

std::uint64_t Budget::at(std::uint64_t consumed) const noexcept
{
    if (phase_ >= 0) {
        if (consumed > static_cast<std::uint64_t>(phase_)) {
            return 0;
        }
        return std::uint64_t{1} << (static_cast<std::uint64_t>(phase_) - consumed);
    }
    return consumed <= max_consumed_ ? steps_ : 0;
}

Filter Filter::along(BitString target)
{
    Filter f;
    f.targeted_ = true;
    f.max_len_ = target.size() + 1;
    f.target_ = std::move(target);
    return f;
}

Filter Filter::all_up_to(std::size_t max_len)
{
    Filter f;
    f.max_len_ = max_len;
    return f;
}

bool Filter::admits(const BitString& y) const
{
    if (y.empty() || y.size() > max_len_) {
        return false;
    }
    if (!targeted_) {
        return true;
    }
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        if (y[i] != target_[i]) {
            return false;
        }
    }
    return true;
}

const std::vector<Computation>& SearchResult::computations(const BitString& y) const
{
    static const std::vector<Computation> none;
    if (!filter_.admits(y)) {
        throw std::out_of_range("string " + y.text() + " is outside this search's filter");
    }
    auto it = records_.find(y);
    return it == records_.end() ? none : it->second;
}

namespace {

// Canonical state key -> number of programs reaching it.
using Level = std::unordered_map<std::string, std::uint64_t>;

class Explorer {
public:
    Explorer(const Budget& budget, const Filter& filter) : budget_(budget), filter_(filter) {}

    void run(SearchStats& stats)
    {
        const bool with_output = !filter_.targeted();
        Level level;
        std::string root;
        vm::MachineState{}.append_canonical(root, with_output);
        level.emplace(std::move(root), 1);
        for (std::uint64_t consumed = 0; !level.empty(); consumed += vm::kOpcodeBits) {
            Level next;
            stats.peak_level_size = std::max<std::uint64_t>(stats.peak_level_size, level.size());
            stats.classes += level.size();
            // Nodes are released as they are processed to bound peak memory.
            while (!level.empty()) {
                auto handle = level.extract(level.begin());
                vm::MachineState s =
                    vm::MachineState::from_canonical(handle.key(), consumed, with_output, filter_.target());
                advance(s, handle.mapped(), consumed, next, stats);
            }
            level = std::move(next);
        }
    }

    std::map<BitString, std::map<std::pair<std::uint32_t, std::uint64_t>, std::uint64_t>> records;
    std::map<std::tuple<std::uint32_t, std::uint32_t, BitString, std::uint64_t>, std::uint64_t> frontier;

private:
    void add_frontier(std::uint64_t consumed, bool reading, const BitString& output, std::uint64_t next_step,
                      std::uint64_t mult)
    {
        if (output.size() >= filter_.max_length()) {
            return;
        }
        const auto c = static_cast<std::uint32_t>(consumed);
        frontier[{c, reading ? c + vm::kOpcodeBits : c, output, next_step}] += mult;
    }

    // Returns false when the branch can produce nothing further.
    bool on_output(const vm::MachineState& s, std::uint64_t consumed, std::uint64_t mult)
    {
        const BitString& y = s.output;
        const std::size_t n = y.size();
        records[y][{static_cast<std::uint32_t>(consumed), s.steps}] += mult;
        if (n >= filter_.max_length()) {
            return false;
        }
        if (filter_.targeted() && y[n - 1] != filter_.target()[n - 1]) {
            return false;
        }
        return true;
    }

    void advance(vm::MachineState& s, std::uint64_t mult, std::uint64_t consumed, Level& next, SearchStats& stats)
    {
        const std::uint64_t budget = budget_.at(consumed);
        vm::SilentLoopDetector detector;
        while (s.running()) {
            if (s.needs_fetch()) {
                const std::uint64_t step = s.steps + 1;
                const std::uint64_t child_budget = budget_.at(consumed + vm::kOpcodeBits);
                if (child_budget == 0 || step > child_budget) {
                    add_frontier(consumed, true, s.output, step, mult);
                    return;
                }
                for (unsigned code = 0; code < 8; ++code) {
                    vm::MachineState child = s;
                    child.fetch(vm::decode(code));
                    child.trim_dead_code();
                    std::string key;
                    child.append_canonical(key, !filter_.targeted());
                    next[std::move(key)] += mult;
                }
                stats.programs_forked += 8;
                return;
            }
            if (s.steps >= budget) {
                add_frontier(consumed, false, s.output, budget + 1, mult);
                return;
            }
            const vm::StepStatus status = vm::execute(s);
            ++stats.executed_steps;
            if (status == vm::StepStatus::Output) {
                detector.reset();
                if (!on_output(s, consumed, mult)) {
                    return;
                }
            }
            if (detector.observe(s, status == vm::StepStatus::Jumped)) {
                ++stats.silent_loops_cut;
                return;
            }
        }
    }

    const Budget& budget_;
    const Filter& filter_;
};

}  // namespace

SearchResult explore(const Budget& budget, const Filter& filter)
{
    SearchResult result(budget, filter);
    Explorer explorer(budget, filter);
    explorer.run(result.stats_);
    for (auto& [y, by_cost] : explorer.records) {
        auto& out = result.records_[y];
        out.reserve(by_cost.size());
        for (const auto& [cost, mult] : by_cost) {
            out.push_back(Computation{cost.first, cost.second, mult});
        }
    }
    result.frontier_.reserve(explorer.frontier.size());
    for (const auto& [key, mult] : explorer.frontier) {
        result.frontier_.push_back(FrontierClass{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), mult});
    }
    return result;
}

}  // namespace speedprior::search
