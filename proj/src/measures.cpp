#include "speedprior/measures.hpp"

#include "speedprior/vm.hpp"

#include <vector>

namespace speedprior::measures {

MeasureSpec MeasureSpec::uniform()
{
    MeasureSpec m;
    m.variant_ = Variant::Uniform;
    m.text_ = "uniform";
    return m;
}

MeasureSpec MeasureSpec::bernoulli(Rational theta)
{
    theta.canonicalize();
    if (theta <= 0 || theta >= 1) {
        throw std::invalid_argument("bernoulli parameter must lie strictly between 0 and 1");
    }
    MeasureSpec m;
    m.variant_ = Variant::Bernoulli;
    m.text_ = "bernoulli:" + to_string(theta);
    m.theta_ = std::move(theta);
    return m;
}

MeasureSpec MeasureSpec::alternating()
{
    MeasureSpec m;
    m.variant_ = Variant::Deterministic;
    m.sequence_ = BitString("01");
    m.periodic_ = true;
    m.text_ = "detseq:alternating";
    return m;
}

MeasureSpec MeasureSpec::ref1_generator(const BitString& program, std::size_t length, std::uint64_t step_limit)
{
    vm::MachineState s;
    vm::BitStringOracle input(program);
    while (s.output.size() < length && s.steps < step_limit) {
        const vm::StepResult r = vm::step(s, input);
        if (r.status == vm::StepStatus::NeedsMoreInput || !s.running()) {
            break;
        }
    }
    if (s.output.size() < length) {
        throw std::invalid_argument("program " + program.text() + " printed only " + std::to_string(s.output.size()) +
                                    " of the " + std::to_string(length) + " bits needed");
    }
    MeasureSpec m;
    m.variant_ = Variant::Deterministic;
    m.sequence_ = s.output;
    m.text_ = "detseq:ref1:" + program.text();
    return m;
}

MeasureSpec MeasureSpec::parse(std::string_view text, std::size_t length)
{
    if (text == "uniform") {
        return uniform();
    }
    if (text.starts_with("bernoulli:")) {
        return bernoulli(parse_rational(text.substr(10)));
    }
    if (text == "detseq:alternating") {
        return alternating();
    }
    if (text.starts_with("detseq:ref1:")) {
        return ref1_generator(BitString(text.substr(12)), length);
    }
    throw std::invalid_argument("unknown measure '" + std::string(text) + "'");
}

Rational measure_eval(const MeasureSpec& spec, const BitString& x)
{
    switch (spec.variant_) {
    case MeasureSpec::Variant::Uniform:
        return pow2(-static_cast<long>(x.size()));
    case MeasureSpec::Variant::Bernoulli: {
        Rational value = 1;
        const Rational zero = 1 - spec.theta_;
        for (std::size_t i = 0; i < x.size(); ++i) {
            value *= x[i] ? spec.theta_ : zero;
        }
        return value;
    }
    case MeasureSpec::Variant::Deterministic: {
        const BitString& seq = spec.sequence_;
        if (!spec.periodic_ && x.size() > seq.size()) {
            throw std::out_of_range("generator output known only to length " + std::to_string(seq.size()));
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] != seq[spec.periodic_ ? i % seq.size() : i]) {
                return 0;
            }
        }
        return 1;
    }
    }
    return 0;
}

Rational MeasureSpec::conditional(const BitString& x, bool bit) const
{
    const Rational given = measure_eval(*this, x);
    if (given == 0) {
        throw std::domain_error("conditional on a string of measure 0");
    }
    return measure_eval(*this, x.appended(bit)) / given;
}

Interval output_interval(const MeasureSpec& spec, const BitString& x)
{
    Interval iv{0, 1};
    BitString prefix;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Rational left = measure_eval(spec, prefix.appended(false));
        if (x[i]) {
            iv.low += left;
            iv.high = iv.low + measure_eval(spec, prefix.appended(true));
        } else {
            iv.high = iv.low + left;
        }
        prefix.push_back(x[i]);
    }
    if (iv.high <= iv.low) {
        throw ZeroWidth("string " + x.text() + " has measure 0 under " + spec.text());
    }
    return iv;
}

Interval input_interval(const BitString& p)
{
    Rational low = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i]) {
            low += pow2(-static_cast<long>(i) - 1);
        }
    }
    return {low, low + pow2(-static_cast<long>(p.size()))};
}

BitString decoder_run(const MeasureSpec& spec, const BitString& input, std::size_t max_output)
{
    // The output only depends on the final input interval: it is the deepest
    // x with I(x) containing it, reached by walking down from the root.
    const Interval in = input_interval(input);
    BitString out;
    Interval current{0, 1};
    while (out.size() < max_output) {
        const Rational left = measure_eval(spec, out.appended(false));
        const Interval zero{current.low, current.low + left};
        const Interval one{zero.high, zero.high + measure_eval(spec, out.appended(true))};
        if (zero.high > zero.low && zero.contains(in)) {
            out.push_back(false);
            current = zero;
        } else if (one.high > one.low && one.contains(in)) {
            out.push_back(true);
            current = one;
        } else {
            break;
        }
    }
    return out;
}

namespace {

// Calls visit(level) for every maximal dyadic interval inside
// `target` up to the given depth; returns true if visit asked to stop.
template <typename Visit>
bool dyadic_cover(const Interval& target, std::size_t depth, Visit&& visit)
{
    if (target.low == 0 && target.high == 1) {
        return visit(0);
    }
    // Dyadic intervals of the current level that meet the target without
    // being inside it. There are at most two per level.
    std::vector<Interval> straddling{{0, 1}};
    for (std::size_t level = 1; level <= depth && !straddling.empty(); ++level) {
        std::vector<Interval> next;
        for (const Interval& parent : straddling) {
            const Rational mid = (parent.low + parent.high) / 2;
            for (const Interval& child : {Interval{parent.low, mid}, Interval{mid, parent.high}}) {
                if (child.high <= target.low || child.low >= target.high) {
                    continue;
                }
                if (target.contains(child)) {
                    if (visit(level)) {
                        return true;
                    }
                } else {
                    next.push_back(child);
                }
            }
        }
        straddling = std::move(next);
    }
    return false;
}

}  // namespace

std::size_t decoder_km(const MeasureSpec& spec, const BitString& x, std::size_t depth_cap)
{
    const Interval target = output_interval(spec, x);
    std::size_t found = 0;
    const bool ok = dyadic_cover(target, depth_cap, [&found](std::size_t level) {
        found = level;
        return true;
    });
    if (!ok) {
        throw DepthCapExceeded("no input of length <= " + std::to_string(depth_cap) + " decodes to " + x.text());
    }
    return found;
}

Rational decoder_mass(const MeasureSpec& spec, const BitString& x, std::size_t depth)
{
    const Interval target = output_interval(spec, x);
    Rational mass = 0;
    dyadic_cover(target, depth, [&mass](std::size_t level) {
        mass += pow2(-static_cast<long>(level));
        return false;
    });
    return mass;
}

}  // namespace speedprior::measures
