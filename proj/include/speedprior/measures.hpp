#pragma once

// Polynomial-time measures and the arithmetic-coding decoder T_nu built on
// them. Output intervals nest: the interval of x is split into those of x0
// (left) and x1 (right), in proportion to nu. T_nu reads input bits, keeps the
// dyadic interval [0.p, 0.p + 2^-|p|) of what it has read, and prints the
// deepest x whose interval contains it.

#include "speedprior/bitstring.hpp"
#include "speedprior/rational.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace speedprior::measures {

class MeasureSpec {
public:
    enum class Variant { Uniform, Bernoulli, Deterministic };

    static MeasureSpec uniform();
    /// 0 < theta < 1 is the probability of a 1.
    static MeasureSpec bernoulli(Rational theta);
    /// 0101... forever.
    static MeasureSpec alternating();
    /// The output of a REF-1 program, run until `length` bits are printed.
    /// Throws std::invalid_argument if the program stops short.
    static MeasureSpec ref1_generator(const BitString& program, std::size_t length,
                                      std::uint64_t step_limit = 100'000'000);

    /// "uniform", "bernoulli:2/3", "detseq:alternating", "detseq:ref1:<bits>".
    /// `length` bounds how much of a REF-1 generator's output is needed.
    static MeasureSpec parse(std::string_view text, std::size_t length = 256);

    Variant variant() const noexcept { return variant_; }
    const Rational& theta() const noexcept { return theta_; }
    bool deterministic() const noexcept { return variant_ == Variant::Deterministic; }
    /// The sequence of a deterministic measure, as far as it is known.
    const BitString& sequence() const noexcept { return sequence_; }
    const std::string& text() const noexcept { return text_; }

    /// nu(b | x); requires nu(x) > 0.
    Rational conditional(const BitString& x, bool bit) const;

private:
    Variant variant_ = Variant::Uniform;
    Rational theta_;
    BitString sequence_;
    bool periodic_ = false;
    std::string text_;

    friend Rational measure_eval(const MeasureSpec&, const BitString&);
};

Rational measure_eval(const MeasureSpec& spec, const BitString& x);

struct Interval {
    Rational low;
    Rational high;

    Rational width() const { return high - low; }
    /// Half-open containment of [other.low, other.high).
    bool contains(const Interval& other) const { return low <= other.low && other.high <= high; }
};

class ZeroWidth : public std::domain_error {
public:
    explicit ZeroWidth(const std::string& what) : std::domain_error(what) {}
};

/// Throws ZeroWidth when nu(x) = 0.
Interval output_interval(const MeasureSpec& spec, const BitString& x);

/// [0.p, 0.p + 2^-|p|).
Interval input_interval(const BitString& p);

/// Output of T_nu after reading all of `input`, capped at max_output bits.
BitString decoder_run(const MeasureSpec& spec, const BitString& input, std::size_t max_output);

class DepthCapExceeded : public std::runtime_error {
public:
    explicit DepthCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Length of the shortest input after which T_nu's output extends x.
/// Throws ZeroWidth if nu(x) = 0 and DepthCapExceeded if none is found within
/// depth_cap bits.
std::size_t decoder_km(const MeasureSpec& spec, const BitString& x, std::size_t depth_cap);

/// sum 2^-|p| over the minimal inputs of length <= depth after which T_nu's
/// output extends x: the maximal dyadic intervals inside x's interval.
Rational decoder_mass(const MeasureSpec& spec, const BitString& x, std::size_t depth);

}  // namespace speedprior::measures
