// Acceptance run: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--only 1,2,...] [--expect-fail 11,...]
// Exit status is 0 when every criterion's outcome matches the expectation
// (PASS unless listed under --expect-fail), 1 otherwise.

#include "oracle/ref1_oracle.hpp"

#include "speedprior/enumerate.hpp"
#include "speedprior/measures.hpp"
#include "speedprior/predictor.hpp"
#include "speedprior/priors.hpp"
#include "speedprior/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace speedprior;

namespace {

// Pinned values. The error count comes from the first run whose joint lower
// bounds were checked against the brute-force interpreter (criterion 8).
constexpr std::size_t kGoldenErrors = 2;
constexpr int kFastpathThreshold = 4;
constexpr int kPredictionCap = 32;
constexpr int kAdversarialCap = 24;
constexpr int kStochasticCap = 24;
constexpr double kCriterion1Seconds = 120;
constexpr double kCriterion8Seconds = 300;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join(const std::vector<std::string>& v, std::size_t limit = 3)
{
    std::string out;
    for (std::size_t i = 0; i < v.size() && i < limit; ++i) {
        out += (i ? "; " : "") + v[i];
    }
    if (v.size() > limit) {
        out += "; ...";
    }
    return out;
}

std::vector<BitString> strings_up_to(std::size_t n)
{
    std::vector<BitString> out;
    for (std::size_t len = 1; len <= n; ++len) {
        for (std::uint64_t c = 0; c < (std::uint64_t{1} << len); ++c) {
            out.emplace_back(oracle::bits(c, len));
        }
    }
    return out;
}

// Shared between criteria 8 and 10.
struct AlternatingRun {
    priors::PriorEngine engine;
    std::optional<predictor::PredictionTrace> trace;
    double seconds = 0;

    const predictor::PredictionTrace& get()
    {
        if (!trace) {
            predictor::PredictorOptions o;
            o.k_cap = kPredictionCap;
            const auto t0 = Clock::now();
            trace = predictor::run_experiment(engine, measures::MeasureSpec::alternating(), priors::Kind::Fast, 64,
                                              Rational(1, 2), 0, predictor::LossSpec::zero_one(), o);
            seconds = seconds_since(t0);
        }
        return *trace;
    }
};

AlternatingRun alternating;

Outcome criterion1()
{
    const auto t0 = Clock::now();
    verify::SuiteOptions o;
    o.k = 10;
    const auto r = verify::soundness(o);
    // The same records, independently: every program of length <= 10 run by
    // the reference interpreter.
    const auto ledger = enumerate::enumerate_up_to_phase(10, enumerate::Mode::Tree);
    std::vector<oracle::Record> mine;
    for (const auto& rec : ledger.records) {
        mine.push_back({rec.program.text(), rec.output.text(), rec.time, rec.first_phase});
    }
    const bool same = mine == oracle::ledger(10);
    std::size_t reverified = 0;
    for (const auto& rec : ledger.records) {
        const auto t = oracle::computes(rec.program.text(), rec.output.text(),
                                        std::uint64_t{1} << (10 - rec.program.size()));
        reverified += (t && *t == rec.time) ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << ledger.records.size() << " records, " << reverified << " re-verified by the reference interpreter, ledger "
      << (same ? "matches" : "differs from") << " brute force, " << secs << " s";
    if (!r.passed) {
        d << "; " << join(r.failures);
    }
    return {r.passed && same && reverified == ledger.records.size() && secs < kCriterion1Seconds, d.str()};
}

Outcome criterion2()
{
    verify::SuiteOptions o;
    o.k = 12;
    const auto r = verify::steps(o);
    bool oracle_ok = true;
    for (int k = 1; k <= 12; ++k) {
        // sum_{i=1..k} i 2^i, summed directly.
        std::uint64_t sum = 0;
        for (int i = 1; i <= k; ++i) {
            sum += static_cast<std::uint64_t>(i) << i;
        }
        oracle_ok = oracle_ok && r.data["rows"][static_cast<std::size_t>(k - 1)]["naiveStepCount"] == sum;
    }
    std::ostringstream d;
    d << "k=1..12, k=12 count " << r.data["naiveStepCount"].dump() << (r.passed ? "" : "; " + join(r.failures));
    return {r.passed && oracle_ok, d.str()};
}

Outcome criterion3()
{
    verify::SuiteOptions o;
    o.k = 14;
    o.n = 4;
    const auto r = verify::kraft(o);
    // Kraft sums again from brute force.
    const auto recs = oracle::ledger(14);
    bool oracle_ok = true;
    for (const auto& x : strings_up_to(4)) {
        mpq_class sum = 0;
        for (const auto& rec : recs) {
            if (rec.output == x.text()) {
                sum += oracle::pow2(-static_cast<long>(rec.program.size()));
            }
        }
        oracle_ok = oracle_ok && sum <= 1;
    }
    std::ostringstream d;
    d << "k=14, |x|<=4, max Kraft sum " << r.data["maxKraftSum"].get<std::string>()
      << (r.passed ? "" : "; " + join(r.failures));
    return {r.passed && oracle_ok, d.str()};
}

Outcome criterion4()
{
    verify::SuiteOptions o;
    o.k = 12;
    o.n = 3;
    const auto r = verify::envelopes(o);
    // Recompute the Fast ratio from the brute-force ledger.
    const auto recs = oracle::ledger(12);
    bool oracle_ok = true;
    for (const auto& x : strings_up_to(3)) {
        mpq_class phase = oracle::fast_lower(recs, x.text(), 12);
        mpq_class cost = 0;
        for (const auto& rec : recs) {
            if (rec.output == x.text()) {
                cost += oracle::pow2(-2 * static_cast<long>(rec.program.size())) / mpq_class(static_cast<unsigned long>(rec.time));
            }
        }
        if (cost > 0) {
            const mpq_class ratio = phase / cost;
            oracle_ok = oracle_ok && ratio > mpq_class(1, 2) && ratio <= 2;
        }
    }
    return {r.passed && oracle_ok, "k=12, |x|<=3, both priors" + (r.passed ? std::string() : "; " + join(r.failures))};
}

Outcome criterion5()
{
    verify::SuiteOptions o;
    o.k = 14;
    o.n = 6;
    const auto r = verify::mass(o);
    std::ostringstream d;
    for (const auto& row : r.data["rows"]) {
        d << "t=" << row["t"].get<std::uint64_t>() << ": " << row["mass"].get<std::string>() << " over "
          << row["setSize"].get<std::size_t>() << " strings; ";
    }
    return {r.passed, d.str() + (r.passed ? "" : join(r.failures))};
}

Outcome criterion6()
{
    verify::SuiteOptions o;
    o.n = 2;
    o.k = 4;
    o.k_cap = 24;
    const auto r = verify::certificate(o);
    // Oracle check of the certified lower bounds that are cheap to brute-force.
    const auto recs = oracle::ledger(19);
    bool oracle_ok = true;
    std::size_t checked = 0;
    for (const auto& row : r.data["rows"]) {
        if (!row["certified"].get<bool>()) {
            continue;
        }
        const int k = row["k"].get<int>();
        const std::string x = row["x"].get<std::string>();
        if (k > 19) {
            continue;
        }
        const mpq_class want = row["kind"] == "Fast" ? oracle::fast_lower(recs, x, k) : oracle::kt_lower(recs, x, k);
        oracle_ok = oracle_ok && parse_rational(row["lower"].get<std::string>()) == want;
        ++checked;
    }
    std::ostringstream d;
    d << r.data["certifiedCount"].get<std::size_t>() << " of " << r.data["rows"].size() << " estimates certified within k<="
      << o.k_cap << ", " << checked << " lower bounds matched brute force" << (r.passed ? "" : "; " + join(r.failures));
    return {r.passed && oracle_ok, d.str()};
}

Outcome criterion7()
{
    verify::SuiteOptions o;
    o.k = 12;
    o.n = 5;
    const auto r = verify::lemma1(o);
    std::ostringstream d;
    for (const auto& row : r.data["rows"]) {
        d << row["measure"].get<std::string>() << " max gap " << row["maxMassGap"].get<std::string>() << "; ";
    }
    return {r.passed, d.str() + "slack 2^-11" + (r.passed ? "" : "; " + join(r.failures))};
}

Outcome criterion8()
{
    // Oracle validation first: the joints the predictor compares, at phases
    // the brute force can reach.
    const int k_check = 18;
    const auto recs = oracle::ledger(k_check);
    bool validated = true;
    for (std::size_t m = 0; m <= 5; ++m) {
        BitString x;
        for (std::size_t i = 0; i < m; ++i) {
            x.push_back(i % 2 == 1);
        }
        for (const bool b : {false, true}) {
            const BitString y = x.appended(b);
            validated = validated && alternating.engine.at_phase(priors::Kind::Fast, y, k_check).lower ==
                                         oracle::fast_lower(recs, y.text(), k_check);
        }
    }
    const auto& t = alternating.get();
    std::size_t late = 0;
    std::vector<std::string> where;
    bool unit = true;
    for (const auto& s : t.steps) {
        if (s.actual != s.predicted) {
            where.push_back(std::to_string(s.t));
            late += s.t > 32 ? 1 : 0;
        }
        unit = unit && s.unit_bound_holds;
    }
    std::ostringstream d;
    d << "errors " << t.errors() << " (golden " << kGoldenErrors << ") at steps " << join(where, 10) << ", second half "
      << late << ", loss bound " << (unit ? "holds" : "fails") << " at every n, joints "
      << (validated ? "match" : "do not match") << " brute force at k=" << k_check << ", " << alternating.seconds << " s";
    return {validated && t.errors() == kGoldenErrors && late == 0 && unit && alternating.seconds < kCriterion8Seconds,
            d.str()};
}

Outcome criterion9()
{
    predictor::PredictorOptions o;
    o.k_cap = kAdversarialCap;
    std::ostringstream d;
    bool pass = true;
    for (const auto& [kind, n] : {std::pair{priors::Kind::Fast, std::size_t{16}}, std::pair{priors::Kind::Kt, std::size_t{8}}}) {
        priors::PriorEngine engine;
        const BitString z = predictor::adversarial_sequence(engine, kind, Rational(1, 2), n, o);
        priors::PriorEngine fresh;
        const auto trace = predictor::run_on_sequence(fresh, kind, z, Rational(1, 2), predictor::LossSpec::zero_one(), o);
        pass = pass && trace.errors() == n;
        d << priors::to_string(kind) << ": " << z << " lost " << trace.errors() << "/" << n << "; ";
    }
    return {pass, d.str()};
}

Outcome criterion10()
{
    const auto& t = alternating.get();
    const auto& half = t.steps[31];
    const auto& full = t.steps[63];
    std::ostringstream d;
    if (!half.conditional_certified || !full.conditional_certified) {
        d << "conditional not certified within k<=" << kPredictionCap << " at n=" << (half.conditional_certified ? 64 : 32);
        return {false, d.str()};
    }
    const int growth = full.k_conditional - half.k_conditional;
    d << "k(32)=" << half.k_conditional << ", k(64)=" << full.k_conditional << ", growth " << growth << " (threshold "
      << kFastpathThreshold << ")";
    const auto dev32 = predictor::deviation_sum(t, 32);
    const auto dev64 = predictor::deviation_sum(t, 64);
    d << "; deviation sum n=32 in [" << approx_double(dev32.low) << ", " << approx_double(dev32.high) << "], n=64 in ["
      << approx_double(dev64.low) << ", " << approx_double(dev64.high) << "] (approx)";
    return {growth <= kFastpathThreshold, d.str()};
}

Outcome criterion11()
{
    verify::SuiteOptions o;
    o.n = 10;
    o.seeds = 30;
    o.k_cap = kStochasticCap;
    const auto t0 = Clock::now();
    const auto r = verify::stochastic(o);
    std::ostringstream d;
    d << "mean regret steps 1-5 " << r.data["earlyMeanRegret"].get<std::string>() << ", steps 6-10 "
      << r.data["lateMeanRegret"].get<std::string>() << ", k<=" << o.k_cap << ", " << seconds_since(t0) << " s";
    std::cerr << r.data["runs"].dump() << '\n';
    return {r.passed, d.str()};
}

std::set<int> parse_list(const std::string& s)
{
    std::set<int> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.insert(std::stoi(item));
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    std::set<int> expect_fail;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--only") {
            only = parse_list(argv[i + 1]);
        } else if (flag == "--expect-fail") {
            expect_fail = parse_list(argv[i + 1]);
        } else {
            std::cerr << "unknown flag " << flag << '\n';
            return 1;
        }
    }
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10, criterion11};
    bool as_expected = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) {
            continue;
        }
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
        as_expected = as_expected && (o.pass != (expect_fail.count(id) != 0));
    }
    return as_expected ? 0 : 1;
}
