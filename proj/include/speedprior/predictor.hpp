#pragma once

// Loss-minimising prediction from certified prior bounds.
//
// At each step the predictor compares the unnormalised joints S(x b), b in
// {0, 1}; the shared denominator S(x) cannot change the argmin. A decision is
// made from the enclosures when they separate. Otherwise the estimates are
// refined (smaller epsilon, more phases) a bounded number of times, and if the
// enclosures still overlap the lower bounds are compared as point values.
// Only an exact tie of those goes to the tie-break bit.

#include "speedprior/bitstring.hpp"
#include "speedprior/measures.hpp"
#include "speedprior/priors.hpp"
#include "speedprior/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace speedprior::predictor {

/// loss(actual, predicted), entries in [0, 1].
class LossSpec {
public:
    static LossSpec zero_one();
    /// Row-major l(0,0), l(0,1), l(1,0), l(1,1). Throws if an entry is outside [0, 1].
    static LossSpec from_entries(std::array<Rational, 4> entries);
    /// "0-1" or four comma-separated rationals in the order above.
    static LossSpec parse(std::string_view text);

    const Rational& operator()(bool actual, bool predicted) const { return l_[actual ? 1 : 0][predicted ? 1 : 0]; }
    std::string text() const;

private:
    Rational l_[2][2];
};

/// Enclosure of an unnormalised joint S(x b).
struct Joint {
    Rational low;
    Rational high;
};

enum class Basis {
    Dominance,   // one action is never worse
    Separated,   // expected-loss enclosures do not overlap
    PointValue,  // lower bounds compared
    TieBreak,
};

const char* to_string(Basis b) noexcept;

struct Decision {
    bool bit = false;
    Basis basis = Basis::TieBreak;
};

Decision predict_next(const Joint& zero, const Joint& one, const LossSpec& loss, bool tie_break);

/// SplitMix64 (Steele, Lea and Flood).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// 1 iff next() / 2^64 < theta, compared exactly.
    bool bernoulli(const Rational& theta);

private:
    std::uint64_t state_;
};

/// n bits from the measure. Deterministic measures ignore the seed.
BitString sample(const measures::MeasureSpec& env, std::size_t n, std::uint64_t seed);

struct PredictorOptions {
    int k_cap = 32;
    bool tie_break = false;
    /// How many times epsilon is halved when enclosures overlap.
    int refinements = 2;
};

struct TraceStep {
    std::size_t t = 0;
    bool actual = false;
    bool predicted = false;
    Basis basis = Basis::TieBreak;
    Rational loss;
    /// Enclosures of S(b | x_<t); empty when S(x_<t) has no positive lower bound yet.
    std::optional<priors::Interval> cond[2];
    Joint joint[2];
    Rational epsilon_used;
    int k_used = 0;
    /// The conditional of the actual bit was certified at k_used.
    bool certified = false;
    /// Least phase at which S(x_1:t) and S(x_<t) are both certified at the
    /// requested epsilon, if that happens within the cap.
    int k_conditional = 0;
    bool conditional_certified = false;
    bool informed_predicted = false;
    Rational informed_loss;
    Rational cum_loss;
    Rational cum_informed_loss;
    /// Lower bound on S(x_1:t) and whether L_t <= -2 ln of it was proved.
    Rational prefix_lower;
    bool unit_bound_holds = false;
};

struct PredictionTrace {
    std::string env;
    priors::Kind kind = priors::Kind::Fast;
    Rational epsilon;
    std::uint64_t seed = 0;
    std::string loss;
    BitString sequence;
    std::vector<TraceStep> steps;

    std::size_t errors() const;
    std::size_t informed_errors() const;
    /// -ln(lower bound on S(x_1:n)) + ln mu(x_1:n); infinite while the lower bound is 0.
    double d_hat = 0;
    /// -ln mu(x_1:n).
    double surprisal = 0;
};

/// Predicts `sequence` bit by bit. `env`, when given, is the true measure and
/// drives the informed predictor; otherwise that column stays at 0 loss.
PredictionTrace run_on_sequence(priors::PriorEngine& engine, priors::Kind kind, const BitString& sequence,
                                const Rational& epsilon, const LossSpec& loss, const PredictorOptions& options,
                                const measures::MeasureSpec* env = nullptr);

PredictionTrace run_experiment(priors::PriorEngine& engine, const measures::MeasureSpec& env, priors::Kind kind,
                               std::size_t n, const Rational& epsilon, std::uint64_t seed, const LossSpec& loss,
                               const PredictorOptions& options);

/// x_t = 1 iff S(0 | x_<t) >= S(1 | x_<t) under the predictor's own comparison.
BitString adversarial_sequence(priors::PriorEngine& engine, priors::Kind kind, const Rational& epsilon,
                               std::size_t n, const PredictorOptions& options);

/// Enclosure of sum_{t <= n} |1 - S(x_t | x_<t)|. Steps without a conditional
/// enclosure count as [0, 1]. n = 0 means the whole trace.
priors::Interval deviation_sum(const PredictionTrace& trace, std::size_t n = 0);

std::string trace_csv(const PredictionTrace& trace);
std::string summary_json(const PredictionTrace& trace);

}  // namespace speedprior::predictor
