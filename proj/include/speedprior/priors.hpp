#pragma once

// Certified approximations of the speed priors
//
//   S_Fast(x) = sum_i 2^-i sum_{p ->_i x} 2^-|p|
//   S_Kt(x)   = sum_{p -> x} 2^-|p| / t(p, x)
//
// from the search results of the first k FAST phases. Every value is exact.
//
// Tails. The part of the prior not yet accounted for after k phases comes from
// (a) found computations, in phases beyond k (S_Fast only), and (b) computations
// below a frontier node of the search. A frontier node that has read c bits,
// printed m bits and whose next step is s covers programs p extending those c
// bits, so their 2^-|p| sum to at most 2^-c, and any of them printing x takes
// at least T = s + |x| - m - 1 steps. That bounds (b) by
//
//   S_Kt:   2^-c / T                      (T rounded down to a power of two)
//   S_Fast: 2^-c * 2^(1 - min|p| - ceil(log2 T))
//
// For S_Fast the reported tail is the smaller of that bound and 2^-k. Both
// sequences of upper bounds are non-increasing in k, so intervals from deeper
// phases nest inside shallower ones.

#include "speedprior/bitstring.hpp"
#include "speedprior/rational.hpp"
#include "speedprior/search.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace speedprior::priors {

enum class Kind { Kt, Fast };

const char* to_string(Kind kind) noexcept;
/// Accepts "kt" / "fast" (any case).
Kind parse_kind(std::string_view text);

struct PriorEstimate {
    Kind kind = Kind::Fast;
    BitString target;
    Rational lower;
    Rational tail;
    int phases_used = 0;
    Rational epsilon;
    bool certified = false;
    /// Empty unless the phase cap was reached without certification.
    std::string diagnostic;

    Rational upper() const { return lower + tail; }
};

/// {kind, x, lower:{num,den}, tail:{num,den}, k, epsilon:{num,den}, certified}
std::string to_json(const PriorEstimate& e);

/// Closed enclosure of a conditional probability.
struct Interval {
    Rational low;
    Rational high;
};

class InsufficientPhases : public std::runtime_error {
public:
    explicit InsufficientPhases(const std::string& what) : std::runtime_error(what) {}
};

struct EngineOptions {
    /// Hard limit on any phase the engine is asked to run.
    int phase_cap = 40;
};

/// Runs and caches searches. Estimates for several strings are cheapest when
/// they share a horizon: a string z such that each queried x has all but its
/// last bit on z. Searches along z serve every prefix of z and every one-bit
/// departure from it.
class PriorEngine {
public:
    explicit PriorEngine(EngineOptions options = {});

    void set_horizon(BitString z);
    const BitString& horizon() const noexcept { return horizon_; }

    /// Bounds after exactly k phases; epsilon is left 0 and certified false.
    PriorEstimate at_phase(Kind kind, const BitString& x, int k);

    /// Raises k from 1 until tail <= epsilon * lower, or k = k_cap.
    PriorEstimate estimate(Kind kind, const BitString& x, const Rational& epsilon, int k_cap);

    /// Enclosure of S(bit | prefix). Throws InsufficientPhases when the
    /// prefix's lower bound is still 0.
    Interval conditional(Kind kind, const BitString& prefix, bool bit, const Rational& epsilon, int k_cap);

    /// The defining sums restricted to computations found in k phases:
    /// S_Fast in phase form, S_Kt in cost form. Equal to at_phase(...).lower.
    Rational defining_form_sum(Kind kind, const BitString& x, int k);
    /// Fast: cost form sum 2^-2|p| / t. Kt: count form sum_{i<=k} 2^-i #{p ->_i x}.
    Rational alternate_form_sum(Kind kind, const BitString& x, int k);
    /// sum 2^-|p| over found p -> x.
    Rational kraft_sum(const BitString& x, int k);

    /// The search behind a query, run on demand.
    const search::SearchResult& search_for(const BitString& x, int k);

    std::size_t searches_run() const noexcept { return searches_run_; }

private:
    BitString target_for(const BitString& x) const;

    EngineOptions options_;
    BitString horizon_;
    std::map<std::pair<BitString, int>, std::unique_ptr<search::SearchResult>> cache_;
    std::size_t searches_run_ = 0;
};

}  // namespace speedprior::priors
