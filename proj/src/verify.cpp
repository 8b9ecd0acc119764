#include "speedprior/verify.hpp"

#include "speedprior/enumerate.hpp"
#include "speedprior/measures.hpp"
#include "speedprior/predictor.hpp"
#include "speedprior/priors.hpp"
#include "speedprior/vm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace speedprior::verify {

namespace {

using json = nlohmann::ordered_json;

json rational_json(const Rational& q) { return speedprior::to_string(q); }

std::vector<BitString> strings_up_to(std::size_t max_len, bool include_empty)
{
    std::vector<BitString> out;
    if (include_empty) {
        out.emplace_back();
    }
    for (std::size_t len = 1; len <= max_len; ++len) {
        for (unsigned code = 0; code < (1U << len); ++code) {
            out.push_back(BitString::from_bits(code, len));
        }
    }
    return out;
}

Rational eps_or_half(const SuiteOptions& o) { return o.epsilon > 0 ? o.epsilon : Rational(1, 2); }

class Checker {
public:
    explicit Checker(SuiteReport& r) : r_(r) {}
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            r_.failures.push_back(what);
        }
    }
    void finish() { r_.passed = r_.failures.empty(); }

private:
    SuiteReport& r_;
};

}  // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"steps", "soundness", "kraft", "envelopes", "mass", "certificate",
                                                "lemma1", "prediction", "adversarial", "fastpath", "stochastic"};
    return names;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& options)
{
    if (name == "steps") return steps(options);
    if (name == "soundness") return soundness(options);
    if (name == "kraft") return kraft(options);
    if (name == "envelopes") return envelopes(options);
    if (name == "mass") return mass(options);
    if (name == "certificate") return certificate(options);
    if (name == "lemma1") return lemma1(options);
    if (name == "prediction") return prediction(options);
    if (name == "adversarial") return adversarial(options);
    if (name == "fastpath") return fastpath(options);
    if (name == "stochastic") return stochastic(options);
    throw std::invalid_argument("unknown suite '" + name + "'");
}

SuiteReport steps(const SuiteOptions& options)
{
    const int k_max = options.k > 0 ? options.k : 12;
    SuiteReport r{"steps", false, json::object(), {}};
    Checker check(r);
    json rows = json::array();
    for (int k = 1; k <= k_max; ++k) {
        const auto ledger = enumerate::enumerate_up_to_phase(k, enumerate::Mode::Naive);
        // 2^(k+1) (k-1) + 2, kept signed for k = 1.
        const std::int64_t closed = (std::int64_t{1} << (k + 1)) * (k - 1) + 2;
        const std::uint64_t reported = ledger.naive_step_count.value_or(0);
        rows.push_back({{"k", k}, {"naiveStepCount", reported}, {"closedForm", closed}});
        check.require(static_cast<std::int64_t>(reported) == closed,
                      "k=" + std::to_string(k) + ": naive mode reported " + std::to_string(reported) + ", expected " +
                          std::to_string(closed));
    }
    r.data["k"] = k_max;
    r.data["naiveStepCount"] = rows.back()["naiveStepCount"];
    r.data["rows"] = rows;
    check.finish();
    return r;
}

SuiteReport soundness(const SuiteOptions& options)
{
    const int k = options.k > 0 ? options.k : 10;
    SuiteReport r{"soundness", false, json::object(), {}};
    Checker check(r);
    enumerate::EnumerationOptions eo;
    eo.workers = std::max(1U, options.workers);
    const auto ledger = enumerate::enumerate_up_to_phase(k, enumerate::Mode::Tree, eo);
    std::size_t verified = 0;
    for (const auto& rec : ledger.records) {
        const std::uint64_t budget = std::uint64_t{1} << (k - static_cast<int>(rec.program.size()));
        const auto res = vm::computes(rec.program, rec.output, budget);
        const bool ok = res.verdict == vm::Verdict::Computes && res.steps == rec.time;
        verified += ok ? 1 : 0;
        check.require(ok, rec.program.text() + " -> " + rec.output.text() + " did not re-verify with t=" +
                              std::to_string(rec.time));
        // Kt-cost |p| + log2 t <= i exactly when t <= 2^(i - |p|).
        for (int i = 1; i <= k; ++i) {
            const long room = i - static_cast<long>(rec.program.size());
            const bool within = room >= 0 && room < 63 && rec.time <= (std::uint64_t{1} << room);
            check.require(within == (rec.first_phase <= i),
                          rec.program.text() + " -> " + rec.output.text() + ": phase membership differs at i=" +
                              std::to_string(i));
        }
    }
    // Each earlier phase finds exactly the records with first_phase <= i.
    for (int i = 1; i < k; ++i) {
        const auto partial = enumerate::enumerate_up_to_phase(i, enumerate::Mode::Tree, eo);
        std::vector<enumerate::ComputationRecord> expected;
        for (auto rec : ledger.records) {
            if (rec.first_phase <= i) {
                expected.push_back(rec);
            }
        }
        // Times reported by a shallower run are the same computations.
        check.require(partial.records == expected, "phase " + std::to_string(i) + " ledger differs from the prefix of phase " +
                                                       std::to_string(k));
    }
    r.data["k"] = k;
    r.data["records"] = ledger.records.size();
    r.data["verified"] = verified;
    check.finish();
    return r;
}

SuiteReport kraft(const SuiteOptions& options)
{
    const int k = options.k > 0 ? options.k : 14;
    const std::size_t max_len = options.n > 0 ? options.n : 4;
    SuiteReport r{"kraft", false, json::object(), {}};
    Checker check(r);
    priors::PriorEngine engine;
    Rational worst_kraft = 0;
    for (const auto& x : strings_up_to(max_len, false)) {
        const Rational sum = engine.kraft_sum(x, k);
        worst_kraft = std::max(worst_kraft, sum);
        check.require(sum <= 1, "Kraft sum for " + x.text() + " is " + speedprior::to_string(sum));
    }
    json semi = json::array();
    for (const auto& x : strings_up_to(max_len, true)) {
        for (const auto kind : {priors::Kind::Fast, priors::Kind::Kt}) {
            const auto whole = engine.at_phase(kind, x, k);
            const auto zero = engine.at_phase(kind, x.appended(false), k);
            const auto one = engine.at_phase(kind, x.appended(true), k);
            const Rational lhs = zero.lower + one.lower;
            const Rational rhs = whole.lower + whole.tail;
            check.require(lhs <= rhs, std::string(priors::to_string(kind)) + " semimeasure fails at '" + x.text() + "'");
            semi.push_back({{"kind", priors::to_string(kind)}, {"x", x.text()}, {"children", rational_json(lhs)},
                            {"parentUpper", rational_json(rhs)}});
        }
    }
    r.data["k"] = k;
    r.data["maxLength"] = max_len;
    r.data["maxKraftSum"] = rational_json(worst_kraft);
    r.data["semimeasure"] = semi;
    check.finish();
    return r;
}

SuiteReport envelopes(const SuiteOptions& options)
{
    const int k = options.k > 0 ? options.k : 12;
    const std::size_t max_len = options.n > 0 ? options.n : 3;
    SuiteReport r{"envelopes", false, json::object(), {}};
    Checker check(r);
    priors::PriorEngine engine;
    json rows = json::array();
    for (const auto& x : strings_up_to(max_len, false)) {
        for (const auto kind : {priors::Kind::Fast, priors::Kind::Kt}) {
            // Fast: phase form over cost form. Kt: count form over cost form.
            const Rational defining = engine.defining_form_sum(kind, x, k);
            const Rational alternate = engine.alternate_form_sum(kind, x, k);
            const Rational& numer = kind == priors::Kind::Fast ? defining : alternate;
            const Rational& denom = kind == priors::Kind::Fast ? alternate : defining;
            json row{{"kind", priors::to_string(kind)}, {"x", x.text()}};
            if (denom == 0) {
                check.require(numer == 0, std::string(priors::to_string(kind)) + " forms disagree on support at " + x.text());
                row["ratio"] = nullptr;
            } else {
                const Rational ratio = numer / denom;
                check.require(ratio > Rational(1, 2) && ratio <= 2,
                              std::string(priors::to_string(kind)) + " ratio " + speedprior::to_string(ratio) + " at " + x.text());
                row["ratio"] = rational_json(ratio);
            }
            rows.push_back(row);
        }
    }
    r.data["k"] = k;
    r.data["rows"] = rows;
    check.finish();
    return r;
}

SuiteReport mass(const SuiteOptions& options)
{
    const int k = options.k > 0 ? options.k : 14;
    const std::size_t max_len = options.n > 0 ? options.n : 6;
    SuiteReport r{"mass", false, json::object(), {}};
    Checker check(r);
    priors::PriorEngine engine;
    json rows = json::array();
    for (const std::uint64_t t : {1, 2, 4, 8}) {
        const auto c = enumerate::incomputable_prefix_set(t, max_len);
        Rational sum = 0;
        for (const auto& x : c.minimal) {
            sum += engine.at_phase(priors::Kind::Kt, x, k).lower;
        }
        const Rational bound(1, static_cast<unsigned long>(t));
        check.require(sum <= bound, "t=" + std::to_string(t) + ": mass " + speedprior::to_string(sum) + " exceeds 1/t");
        rows.push_back({{"t", t}, {"setSize", c.minimal.size()}, {"mass", rational_json(sum)}, {"bound", rational_json(bound)}});
    }
    r.data["k"] = k;
    r.data["maxLength"] = max_len;
    r.data["rows"] = rows;
    check.finish();
    return r;
}

SuiteReport certificate(const SuiteOptions& options)
{
    const int k_cap = options.k_cap > 0 ? options.k_cap : 24;
    const int deeper = options.k > 0 ? options.k : 4;
    const std::size_t max_len = options.n > 0 ? options.n : 2;
    SuiteReport r{"certificate", false, json::object(), {}};
    Checker check(r);
    priors::PriorEngine engine;
    json rows = json::array();
    std::size_t certified = 0;
    for (const auto& x : strings_up_to(max_len, false)) {
        for (const auto kind : {priors::Kind::Fast, priors::Kind::Kt}) {
            for (const Rational& eps : {Rational(1, 2), Rational(1, 4)}) {
                const auto e = engine.estimate(kind, x, eps, k_cap);
                json row{{"kind", priors::to_string(kind)}, {"x", x.text()}, {"epsilon", rational_json(eps)},
                         {"k", e.phases_used}, {"certified", e.certified}};
                if (e.certified) {
                    ++certified;
                    const auto deep = engine.at_phase(kind, x, e.phases_used + deeper);
                    const bool bound = e.tail <= eps * e.lower;
                    const bool nested = e.lower <= deep.lower && deep.upper() <= e.upper();
                    check.require(bound, "tail exceeds epsilon*lower for " + x.text());
                    check.require(nested, std::string(priors::to_string(kind)) + " interval for " + x.text() +
                                              " does not contain the one at k+" + std::to_string(deeper));
                    row["lower"] = rational_json(e.lower);
                    row["upper"] = rational_json(e.upper());
                    row["deepLower"] = rational_json(deep.lower);
                    row["deepUpper"] = rational_json(deep.upper());
                }
                rows.push_back(row);
            }
        }
    }
    r.data["kCap"] = k_cap;
    r.data["certifiedCount"] = certified;
    r.data["rows"] = rows;
    check.finish();
    return r;
}

SuiteReport lemma1(const SuiteOptions& options)
{
    const int depth = options.k > 0 ? options.k : 12;
    const std::size_t max_len = options.n > 0 ? options.n : 5;
    SuiteReport r{"lemma1", false, json::object(), {}};
    Checker check(r);
    json rows = json::array();
    const Rational slack = pow2(1 - depth);
    for (const auto& nu : {measures::MeasureSpec::uniform(), measures::MeasureSpec::bernoulli(Rational(2, 3))}) {
        Rational worst_gap = 0;
        for (const auto& x : strings_up_to(max_len, false)) {
            const Rational value = measures::measure_eval(nu, x);
            const Rational m = measures::decoder_mass(nu, x, static_cast<std::size_t>(depth));
            const Rational gap = m > value ? Rational(m - value) : Rational(value - m);
            worst_gap = std::max(worst_gap, gap);
            check.require(gap <= slack, nu.text() + ": decoder mass off by " + speedprior::to_string(gap) + " at " + x.text());
            const std::size_t km = measures::decoder_km(nu, x, 64);
            check.require(pow2(-static_cast<long>(km)) >= value / 4, nu.text() + ": Km too large at " + x.text());
        }
        rows.push_back({{"measure", nu.text()}, {"maxMassGap", rational_json(worst_gap)}});
    }
    r.data["depth"] = depth;
    r.data["slack"] = rational_json(slack);
    r.data["rows"] = rows;
    check.finish();
    return r;
}

namespace {

predictor::PredictionTrace alternating_trace(priors::PriorEngine& engine, const SuiteOptions& options, std::size_t n)
{
    predictor::PredictorOptions po;
    po.k_cap = options.k_cap > 0 ? options.k_cap : 32;
    return predictor::run_experiment(engine, measures::MeasureSpec::alternating(), priors::Kind::Fast, n,
                                     eps_or_half(options), options.seed, predictor::LossSpec::zero_one(), po);
}

}  // namespace

SuiteReport prediction(const SuiteOptions& options)
{
    const std::size_t n = options.n > 0 ? options.n : 64;
    SuiteReport r{"prediction", false, json::object(), {}};
    Checker check(r);
    priors::PriorEngine engine;
    const auto trace = alternating_trace(engine, options, n);
    std::size_t late = 0;
    std::vector<std::size_t> error_steps;
    bool unit = true;
    for (const auto& s : trace.steps) {
        if (s.actual != s.predicted) {
            error_steps.push_back(s.t);
            late += s.t > n / 2 ? 1 : 0;
        }
        check.require(s.unit_bound_holds, "loss bound not proved at t=" + std::to_string(s.t));
        unit = unit && s.unit_bound_holds;
    }
    check.require(late == 0, std::to_string(late) + " errors in the second half");
    if (options.expected_errors) {
        check.require(trace.errors() == *options.expected_errors,
                      "errors " + std::to_string(trace.errors()) + " != expected " + std::to_string(*options.expected_errors));
    }
    r.data["n"] = n;
    r.data["errors"] = trace.errors();
    r.data["errorSteps"] = error_steps;
    r.data["secondHalfErrors"] = late;
    r.data["unitBoundHolds"] = unit;
    r.data["summary"] = json::parse(predictor::summary_json(trace));
    check.finish();
    return r;
}

SuiteReport adversarial(const SuiteOptions& options)
{
    SuiteReport r{"adversarial", false, json::object(), {}};
    Checker check(r);
    predictor::PredictorOptions po;
    po.k_cap = options.k_cap > 0 ? options.k_cap : 24;
    const Rational eps = eps_or_half(options);
    json rows = json::array();
    for (const auto kind : {priors::Kind::Fast, priors::Kind::Kt}) {
        const std::size_t n = options.n > 0 ? options.n : (kind == priors::Kind::Fast ? 16 : 8);
        priors::PriorEngine engine;
        const BitString z = predictor::adversarial_sequence(engine, kind, eps, n, po);
        const auto trace = predictor::run_on_sequence(engine, kind, z, eps, predictor::LossSpec::zero_one(), po);
        check.require(trace.errors() == n, std::string(priors::to_string(kind)) + ": only " + std::to_string(trace.errors()) +
                                               " of " + std::to_string(n) + " steps lost");
        rows.push_back({{"kind", priors::to_string(kind)}, {"n", n}, {"sequence", z.text()}, {"errors", trace.errors()}});
    }
    r.data["rows"] = rows;
    check.finish();
    return r;
}

SuiteReport fastpath(const SuiteOptions& options)
{
    const std::size_t n = options.n > 0 ? options.n : 64;
    const int threshold = options.k > 0 ? options.k : 4;
    SuiteReport r{"fastpath", false, json::object(), {}};
    Checker check(r);
    priors::PriorEngine engine;
    const auto trace = alternating_trace(engine, options, n);
    json phases = json::array();
    for (const auto& s : trace.steps) {
        phases.push_back(s.conditional_certified ? json(s.k_conditional) : json(nullptr));
    }
    const auto& half = trace.steps[n / 2 - 1];
    const auto& full = trace.steps[n - 1];
    check.require(half.conditional_certified, "conditional at n/2 not certified within the cap");
    check.require(full.conditional_certified, "conditional at n not certified within the cap");
    if (half.conditional_certified && full.conditional_certified) {
        check.require(full.k_conditional - half.k_conditional <= threshold,
                      "k grew by " + std::to_string(full.k_conditional - half.k_conditional));
    }
    r.data["n"] = n;
    r.data["kHalf"] = half.conditional_certified ? json(half.k_conditional) : json(nullptr);
    r.data["kFull"] = full.conditional_certified ? json(full.k_conditional) : json(nullptr);
    r.data["threshold"] = threshold;
    r.data["phases"] = phases;
    check.finish();
    return r;
}

SuiteReport stochastic(const SuiteOptions& options)
{
    const std::size_t n = options.n > 0 ? options.n : 10;
    SuiteReport r{"stochastic", false, json::object(), {}};
    Checker check(r);
    predictor::PredictorOptions po;
    po.k_cap = options.k_cap > 0 ? options.k_cap : 24;
    const auto env = measures::MeasureSpec::bernoulli(Rational(2, 3));
    const std::size_t split = n / 2;
    Rational early = 0;
    Rational late = 0;
    json runs = json::array();
    for (std::uint64_t i = 0; i < options.seeds; ++i) {
        const std::uint64_t seed = options.seed + i;
        priors::PriorEngine engine;
        const auto trace = predictor::run_experiment(engine, env, priors::Kind::Kt, n, eps_or_half(options), seed,
                                                     predictor::LossSpec::zero_one(), po);
        json regret = json::array();
        for (const auto& s : trace.steps) {
            const Rational d = s.loss - s.informed_loss;
            (s.t <= split ? early : late) += d;
            regret.push_back(rational_json(d));
        }
        runs.push_back({{"seed", seed},
                        {"sequence", trace.sequence.text()},
                        {"regret", regret},
                        {"dHatApprox", std::isfinite(trace.d_hat) ? json(trace.d_hat) : json(nullptr)}});
    }
    const auto seeds = static_cast<unsigned long>(std::max<std::uint64_t>(options.seeds, 1));
    const Rational early_mean = early / Rational(seeds * split);
    const Rational late_mean = late / Rational(seeds * (n - split));
    check.require(late_mean < early_mean, "mean regret over the later steps (" + speedprior::to_string(late_mean) +
                                              ") is not below the earlier steps (" + speedprior::to_string(early_mean) + ")");
    r.data["n"] = n;
    r.data["seeds"] = options.seeds;
    r.data["earlyMeanRegret"] = rational_json(early_mean);
    r.data["lateMeanRegret"] = rational_json(late_mean);
    r.data["runs"] = runs;
    check.finish();
    return r;
}

}  // namespace speedprior::verify
