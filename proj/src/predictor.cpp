#include "speedprior/predictor.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace speedprior::predictor {

LossSpec LossSpec::zero_one()
{
    return from_entries({Rational(0), Rational(1), Rational(1), Rational(0)});
}

LossSpec LossSpec::from_entries(std::array<Rational, 4> entries)
{
    LossSpec spec;
    for (std::size_t i = 0; i < 4; ++i) {
        if (entries[i] < 0 || entries[i] > 1) {
            throw std::invalid_argument("loss entries must lie in [0, 1]");
        }
        spec.l_[i / 2][i % 2] = entries[i];
    }
    return spec;
}

LossSpec LossSpec::parse(std::string_view text)
{
    if (text == "0-1" || text == "zero-one") {
        return zero_one();
    }
    std::array<Rational, 4> entries;
    std::size_t count = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        if (count == 4) {
            throw std::invalid_argument("loss matrix needs exactly four entries");
        }
        entries[count++] = parse_rational(text.substr(start, comma - start));
        start = comma + 1;
    }
    if (count != 4) {
        throw std::invalid_argument("loss matrix needs exactly four entries");
    }
    return from_entries(entries);
}

std::string LossSpec::text() const
{
    return speedprior::to_string(l_[0][0]) + "," + speedprior::to_string(l_[0][1]) + "," + speedprior::to_string(l_[1][0]) + "," + speedprior::to_string(l_[1][1]);
}

const char* to_string(Basis b) noexcept
{
    switch (b) {
    case Basis::Dominance: return "dominance";
    case Basis::Separated: return "separated";
    case Basis::PointValue: return "pointValue";
    case Basis::TieBreak: return "tieBreak";
    }
    return "?";
}

Decision predict_next(const Joint& zero, const Joint& one, const LossSpec& loss, bool tie_break)
{
    for (const bool y : {false, true}) {
        const bool other = !y;
        const bool never_worse = loss(false, y) <= loss(false, other) && loss(true, y) <= loss(true, other);
        const bool sometimes_better = loss(false, y) < loss(false, other) || loss(true, y) < loss(true, other);
        if (never_worse && sometimes_better) {
            return {y, Basis::Dominance};
        }
    }
    // Expected loss of predicting y, up to the common normaliser.
    auto low = [&](bool y) { return Rational(zero.low * loss(false, y) + one.low * loss(true, y)); };
    auto high = [&](bool y) { return Rational(zero.high * loss(false, y) + one.high * loss(true, y)); };
    if (high(false) < low(true)) {
        return {false, Basis::Separated};
    }
    if (high(true) < low(false)) {
        return {true, Basis::Separated};
    }
    const Rational point0 = low(false);
    const Rational point1 = low(true);
    if (point0 != point1) {
        return {point1 < point0, Basis::PointValue};
    }
    return {tie_break, Basis::TieBreak};
}

std::uint64_t SplitMix64::next()
{
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool SplitMix64::bernoulli(const Rational& theta)
{
    const mpz_class u(std::to_string(next()));
    mpz_class scaled = theta.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 64);
    return u * theta.get_den() < scaled;
}

BitString sample(const measures::MeasureSpec& env, std::size_t n, std::uint64_t seed)
{
    BitString x;
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        if (env.deterministic()) {
            x.push_back(measures::measure_eval(env, x.appended(true)) > 0);
        } else {
            x.push_back(rng.bernoulli(env.conditional(x, true)));
        }
    }
    return x;
}

namespace {

struct StepBounds {
    priors::PriorEstimate joint[2];
    priors::PriorEstimate prefix;
    Rational epsilon;
    int k = 0;
};

bool certifies(const priors::PriorEstimate& e, const Rational& epsilon)
{
    return e.lower > 0 && e.tail <= epsilon * e.lower;
}

// Both joints and the prefix at one common phase: the least at which each
// joint is certified, or the cap.
StepBounds bounds_at(priors::PriorEngine& engine, priors::Kind kind, const BitString& x, const Rational& epsilon,
                     int k_cap)
{
    StepBounds b;
    b.epsilon = epsilon;
    const auto e0 = engine.estimate(kind, x.appended(false), epsilon, k_cap);
    const auto e1 = engine.estimate(kind, x.appended(true), epsilon, k_cap);
    b.k = std::max(e0.phases_used, e1.phases_used);
    for (const bool bit : {false, true}) {
        auto& j = b.joint[bit ? 1 : 0];
        j = engine.at_phase(kind, x.appended(bit), b.k);
        j.epsilon = epsilon;
        j.certified = certifies(j, epsilon);
    }
    b.prefix = engine.at_phase(kind, x, x.empty() ? 0 : b.k);
    b.prefix.epsilon = epsilon;
    b.prefix.certified = x.empty() || certifies(b.prefix, epsilon);
    return b;
}

struct Outcome {
    StepBounds bounds;
    Decision decision;
};

Outcome decide(priors::PriorEngine& engine, priors::Kind kind, const BitString& x, const Rational& epsilon,
               const LossSpec& loss, const PredictorOptions& options, bool tie_break)
{
    Rational eps = epsilon;
    for (int round = 0;; ++round) {
        Outcome o;
        o.bounds = bounds_at(engine, kind, x, eps, options.k_cap);
        const auto& j = o.bounds.joint;
        o.decision = predict_next({j[0].lower, j[0].upper()}, {j[1].lower, j[1].upper()}, loss, tie_break);
        const bool settled = o.decision.basis == Basis::Dominance || o.decision.basis == Basis::Separated;
        if (settled || round >= options.refinements || o.bounds.k >= options.k_cap) {
            return o;
        }
        eps /= 2;
    }
}

double neg_ln(const Rational& q)
{
    return q > 0 ? -approx_ln(q) : std::numeric_limits<double>::infinity();
}

}  // namespace

std::size_t PredictionTrace::errors() const
{
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [](const TraceStep& s) { return s.actual != s.predicted; }));
}

std::size_t PredictionTrace::informed_errors() const
{
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [](const TraceStep& s) { return s.actual != s.informed_predicted; }));
}

PredictionTrace run_on_sequence(priors::PriorEngine& engine, priors::Kind kind, const BitString& sequence,
                                const Rational& epsilon, const LossSpec& loss, const PredictorOptions& options,
                                const measures::MeasureSpec* env)
{
    PredictionTrace trace;
    trace.env = env ? env->text() : std::string("sequence");
    trace.kind = kind;
    trace.epsilon = epsilon;
    trace.loss = loss.text();
    trace.sequence = sequence;
    engine.set_horizon(sequence);

    Rational cum = 0;
    Rational cum_informed = 0;
    BitString x;
    for (std::size_t t = 1; t <= sequence.size(); ++t) {
        const bool actual = sequence[t - 1];
        const Outcome o = decide(engine, kind, x, epsilon, loss, options, options.tie_break);
        const StepBounds& b = o.bounds;

        TraceStep step;
        step.t = t;
        step.actual = actual;
        step.predicted = o.decision.bit;
        step.basis = o.decision.basis;
        step.loss = loss(actual, step.predicted);
        step.epsilon_used = b.epsilon;
        step.k_used = b.k;
        // Only the conditional of the bit that occurred has to be certified; a
        // departure joint may have no known computation at all.
        step.certified = b.joint[actual ? 1 : 0].certified && b.prefix.certified;
        {
            const auto whole = engine.estimate(kind, x.appended(actual), epsilon, options.k_cap);
            const auto given = engine.estimate(kind, x, epsilon, options.k_cap);
            step.k_conditional = std::max(whole.phases_used, given.phases_used);
            step.conditional_certified = whole.certified && given.certified;
        }
        for (const int bit : {0, 1}) {
            step.joint[bit] = {b.joint[bit].lower, b.joint[bit].upper()};
            if (b.prefix.lower > 0) {
                step.cond[bit] = priors::Interval{b.joint[bit].lower / b.prefix.upper(),
                                                  b.joint[bit].upper() / b.prefix.lower};
            }
        }
        if (env) {
            const Rational mu0 = measures::measure_eval(*env, x.appended(false));
            const Rational mu1 = measures::measure_eval(*env, x.appended(true));
            step.informed_predicted = predict_next({mu0, mu0}, {mu1, mu1}, loss, options.tie_break).bit;
            step.informed_loss = loss(actual, step.informed_predicted);
        } else {
            step.informed_predicted = actual;
            step.informed_loss = 0;
        }
        cum += step.loss;
        cum_informed += step.informed_loss;
        step.cum_loss = cum;
        step.cum_informed_loss = cum_informed;
        step.prefix_lower = b.joint[actual ? 1 : 0].lower;
        // With an informed loss of 0 the unit loss bound reads L <= 2 D, and
        // D <= -ln(lower bound on S(x_1:t)).
        step.unit_bound_holds = certified_le_minus_two_ln(cum, step.prefix_lower);
        trace.steps.push_back(std::move(step));
        x.push_back(actual);
    }
    if (!trace.steps.empty()) {
        const Rational& lower = trace.steps.back().prefix_lower;
        const double ln_mu = env ? approx_ln(measures::measure_eval(*env, sequence)) : 0.0;
        trace.d_hat = neg_ln(lower) + ln_mu;
        trace.surprisal = -ln_mu;
    }
    return trace;
}

PredictionTrace run_experiment(priors::PriorEngine& engine, const measures::MeasureSpec& env, priors::Kind kind,
                               std::size_t n, const Rational& epsilon, std::uint64_t seed, const LossSpec& loss,
                               const PredictorOptions& options)
{
    const BitString x = sample(env, n, seed);
    PredictionTrace trace = run_on_sequence(engine, kind, x, epsilon, loss, options, &env);
    trace.seed = seed;
    return trace;
}

BitString adversarial_sequence(priors::PriorEngine& engine, priors::Kind kind, const Rational& epsilon,
                               std::size_t n, const PredictorOptions& options)
{
    engine.set_horizon(BitString{});
    BitString x;
    const LossSpec loss = LossSpec::zero_one();
    for (std::size_t t = 0; t < n; ++t) {
        // Under 0-1 loss with ties going to 0, the predictor says 0 exactly
        // when S(0 | x) >= S(1 | x).
        const Outcome o = decide(engine, kind, x, epsilon, loss, options, false);
        x.push_back(!o.decision.bit);
    }
    return x;
}

priors::Interval deviation_sum(const PredictionTrace& trace, std::size_t n)
{
    if (n == 0 || n > trace.steps.size()) {
        n = trace.steps.size();
    }
    priors::Interval sum{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const TraceStep& s = trace.steps[i];
        const auto& cond = s.cond[s.actual ? 1 : 0];
        if (!cond) {
            sum.high += 1;
            continue;
        }
        // The true conditional lies in [low, min(high, 1)].
        const Rational high = std::min(cond->high, Rational(1));
        sum.low += 1 - high;
        sum.high += 1 - cond->low;
    }
    return sum;
}

std::string trace_csv(const PredictionTrace& trace)
{
    std::ostringstream out;
    out << "t,x_t,y_t,loss,cond0_low,cond0_high,cond1_low,cond1_high,k_used,certified,cum_loss,cum_informed_loss\n";
    for (const TraceStep& s : trace.steps) {
        out << s.t << ',' << (s.actual ? 1 : 0) << ',' << (s.predicted ? 1 : 0) << ',' << speedprior::to_string(s.loss);
        for (const auto& c : s.cond) {
            if (c) {
                out << ',' << speedprior::to_string(c->low) << ',' << speedprior::to_string(c->high);
            } else {
                out << ",,";
            }
        }
        out << ',' << s.k_used << ',' << (s.certified ? "true" : "false") << ',' << speedprior::to_string(s.cum_loss) << ','
            << speedprior::to_string(s.cum_informed_loss) << '\n';
    }
    return out.str();
}

namespace {

nlohmann::ordered_json rational_json(const Rational& q)
{
    return {{"num", numerator_string(q)}, {"den", denominator_string(q)}};
}

nlohmann::ordered_json finite_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string summary_json(const PredictionTrace& trace)
{
    nlohmann::ordered_json j;
    j["env"] = trace.env;
    j["kind"] = priors::to_string(trace.kind);
    j["n"] = trace.steps.size();
    j["epsilon"] = rational_json(trace.epsilon);
    j["seed"] = trace.seed;
    j["loss"] = trace.loss;
    j["sequence"] = trace.sequence.text();
    j["errors"] = trace.errors();
    j["informedErrors"] = trace.informed_errors();
    const Rational zero = 0;
    j["cumLoss"] = rational_json(trace.steps.empty() ? zero : trace.steps.back().cum_loss);
    j["cumInformedLoss"] = rational_json(trace.steps.empty() ? zero : trace.steps.back().cum_informed_loss);
    j["prefixLower"] = rational_json(trace.steps.empty() ? zero : trace.steps.back().prefix_lower);
    j["dHatApprox"] = finite_or_null(trace.d_hat);
    j["surprisalApprox"] = finite_or_null(trace.surprisal);
    const auto dev = deviation_sum(trace);
    j["deviationSum"] = {{"low", rational_json(dev.low)}, {"high", rational_json(dev.high)}};
    j["unitBoundHolds"] = std::all_of(trace.steps.begin(), trace.steps.end(),
                                      [](const TraceStep& s) { return s.unit_bound_holds; });
    int k_max = 0;
    std::size_t certified = 0;
    for (const auto& s : trace.steps) {
        k_max = std::max(k_max, s.k_used);
        certified += s.certified ? 1 : 0;
    }
    j["maxPhases"] = k_max;
    j["certifiedSteps"] = certified;
    auto& phases = j["conditionalPhases"] = nlohmann::ordered_json::array();
    for (const auto& s : trace.steps) {
        phases.push_back(s.conditional_certified ? nlohmann::ordered_json(s.k_conditional) : nlohmann::ordered_json(nullptr));
    }
    return j.dump(2);
}

}  // namespace speedprior::predictor
