#pragma once

// Aggregated exhaustive search over REF-1 programs.
//
// The execution tree forks on every 3-bit read. Sibling branches that reach
// the same machine configuration (after dead code is dropped and the tape is
// taken relative to the head) behave identically from then on, so they are
// merged and carried with a multiplicity: the number of distinct programs
// that lead there. Branches are pruned only when they provably cannot produce
// another computation of interest: the output left the filter, the machine
// halted or failed, or a silent loop was shown to repeat forever.
//
// Branches stopped by the step budget or the read limit form the frontier.
// Every computation not yet found lies below exactly one frontier node, which
// is what the prior tail bounds are built on.

#include "speedprior/bitstring.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace speedprior::search {

/// Step allowance as a function of the number of bits consumed.
class Budget {
public:
    /// FAST phase k: 2^(k-c) steps with c bits read, c <= k.
    static Budget phase(int k);
    /// A flat allowance of `steps`, reading at most `max_consumed` bits.
    static Budget uniform(std::uint64_t steps, std::uint64_t max_consumed);

    /// 0 when reading `consumed` bits is not allowed at all.
    std::uint64_t at(std::uint64_t consumed) const noexcept;

    bool is_phase() const noexcept { return phase_ >= 0; }
    int phase_k() const noexcept { return phase_; }

private:
    int phase_ = -1;
    std::uint64_t steps_ = 0;
    std::uint64_t max_consumed_ = 0;
};

/// Which outputs are worth recording.
class Filter {
public:
    /// Strings y with |y| <= |target| + 1 whose first |y|-1 bits are a prefix
    /// of `target`: every prefix of the target and every one-bit departure.
    static Filter along(BitString target);
    /// Every string of length 1..max_len.
    static Filter all_up_to(std::size_t max_len);

    bool targeted() const noexcept { return targeted_; }
    const BitString& target() const noexcept { return target_; }
    std::size_t max_length() const noexcept { return max_len_; }
    bool admits(const BitString& y) const;

private:
    bool targeted_ = false;
    BitString target_;
    std::size_t max_len_ = 0;
};

/// A class of computations p -> y sharing |p| and t(p, y).
struct Computation {
    std::uint32_t program_length = 0;
    std::uint64_t time = 0;
    std::uint64_t multiplicity = 0;
};

/// A class of frontier nodes. Programs below one of them extend its `consumed`
/// bits, have length >= min_length (consumed + 3 when the node was waiting for
/// input) and print their next bit no earlier than step next_step.
struct FrontierClass {
    std::uint32_t consumed = 0;
    std::uint32_t min_length = 0;
    BitString output;
    std::uint64_t next_step = 0;
    std::uint64_t multiplicity = 0;
};

struct SearchStats {
    std::uint64_t classes = 0;
    std::uint64_t programs_forked = 0;
    std::uint64_t executed_steps = 0;
    std::uint64_t silent_loops_cut = 0;
    std::uint64_t peak_level_size = 0;
};

class SearchResult {
public:
    SearchResult(Budget budget, Filter filter) : budget_(budget), filter_(std::move(filter)) {}

    const Budget& budget() const noexcept { return budget_; }
    const Filter& filter() const noexcept { return filter_; }

    /// Computations of exactly y, sorted by (program_length, time). Empty if
    /// none were found. Throws std::out_of_range if y is outside the filter.
    const std::vector<Computation>& computations(const BitString& y) const;

    const std::map<BitString, std::vector<Computation>>& all_computations() const noexcept { return records_; }
    const std::vector<FrontierClass>& frontier() const noexcept { return frontier_; }
    const SearchStats& stats() const noexcept { return stats_; }

private:
    friend SearchResult explore(const Budget&, const Filter&);

    Budget budget_;
    Filter filter_;
    std::map<BitString, std::vector<Computation>> records_;
    std::vector<FrontierClass> frontier_;
    SearchStats stats_;
};

SearchResult explore(const Budget& budget, const Filter& filter);

}  // namespace speedprior::search
