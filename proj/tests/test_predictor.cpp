#include "speedprior/predictor.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace speedprior;
using namespace speedprior::predictor;

namespace {

Joint point(const Rational& q) { return {q, q}; }

}  // namespace

TEST_CASE("argmin decisions")
{
    const auto zero_one = LossSpec::zero_one();
    CHECK(predict_next(point(Rational(3, 5)), point(Rational(2, 5)), zero_one, true).bit == false);
    const auto tie = predict_next(point(Rational(1, 2)), point(Rational(1, 2)), zero_one, false);
    CHECK(tie.bit == false);
    CHECK(tie.basis == Basis::TieBreak);
    CHECK(predict_next(point(Rational(1, 2)), point(Rational(1, 2)), zero_one, true).bit == true);

    const auto always_one = LossSpec::from_entries({Rational(1), Rational(0), Rational(1), Rational(0)});
    for (const auto& [a, b] : std::vector<std::pair<int, int>>{{9, 1}, {1, 9}, {5, 5}}) {
        const auto d = predict_next(point(Rational(a, 10)), point(Rational(b, 10)), always_one, false);
        CHECK(d.bit == true);
        CHECK(d.basis == Basis::Dominance);
    }

    // Overlapping enclosures fall back to the lower bounds.
    const auto d = predict_next({Rational(1, 4), Rational(3, 4)}, {Rational(1, 3), Rational(2, 3)}, zero_one, false);
    CHECK(d.basis == Basis::PointValue);
    CHECK(d.bit == true);
    const auto s = predict_next({Rational(1, 2), Rational(3, 4)}, {Rational(1, 8), Rational(1, 4)}, zero_one, true);
    CHECK(s.basis == Basis::Separated);
    CHECK(s.bit == false);
}

TEST_CASE("decisions do not change when both joints are rescaled")
{
    SplitMix64 rng(3);
    const auto losses = {LossSpec::zero_one(), LossSpec::parse("0,1/2,1,0"), LossSpec::parse("1/3,1,1/4,0")};
    for (int i = 0; i < 500; ++i) {
        auto r = [&rng] { return Rational(static_cast<unsigned long>(rng.next() % 100), 100UL); };
        Joint a{r(), 0};
        a.high = a.low + r();
        Joint b{r(), 0};
        b.high = b.low + r();
        const Rational c(static_cast<unsigned long>(1 + rng.next() % 50), static_cast<unsigned long>(1 + rng.next() % 50));
        for (const auto& loss : losses) {
            const auto d1 = predict_next(a, b, loss, false);
            const auto d2 = predict_next({a.low * c, a.high * c}, {b.low * c, b.high * c}, loss, false);
            CHECK(d1.bit == d2.bit);
            CHECK(d1.basis == d2.basis);
        }
    }
}

TEST_CASE("loss specs")
{
    CHECK(LossSpec::parse("0-1").text() == "0,1,1,0");
    CHECK(LossSpec::parse("0,1/2,1,0")(false, true) == Rational(1, 2));
    CHECK_THROWS(LossSpec::parse("0,2,1,0"));
    CHECK_THROWS(LossSpec::parse("0,1,1"));
    CHECK_THROWS(LossSpec::parse("0,1,1,0,0"));
}

TEST_CASE("SplitMix64 reference values")
{
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("sampling")
{
    const auto env = measures::MeasureSpec::bernoulli(Rational(2, 3));
    CHECK(sample(env, 50, 9) == sample(env, 50, 9));
    CHECK(sample(env, 50, 9) != sample(env, 50, 10));
    const BitString long_run = sample(env, 3000, 1);
    const auto ones = std::count(long_run.text().begin(), long_run.text().end(), '1');
    CHECK(ones > 1850);
    CHECK(ones < 2150);
    CHECK(sample(measures::MeasureSpec::alternating(), 6, 123) == BitString("010101"));
}

TEST_CASE("short alternating run")
{
    priors::PriorEngine engine;
    PredictorOptions o;
    o.k_cap = 22;
    const auto trace = run_experiment(engine, measures::MeasureSpec::alternating(), priors::Kind::Fast, 8,
                                      Rational(1, 2), 0, LossSpec::zero_one(), o);
    REQUIRE(trace.steps.size() == 8);
    Rational prev = 0;
    for (const auto& s : trace.steps) {
        CHECK(s.cum_loss >= prev);
        prev = s.cum_loss;
        CHECK(s.unit_bound_holds);
        CHECK(s.informed_loss == 0);
    }
    // The first bit is 0, which the shortest program prints.
    CHECK(trace.steps[0].predicted == false);
    CHECK(trace.steps[0].certified);

    const auto csv = trace_csv(trace);
    CHECK(csv.rfind("t,x_t,y_t,loss,cond0_low,cond0_high,cond1_low,cond1_high,k_used,certified,cum_loss,cum_informed_loss\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

    const auto j = nlohmann::json::parse(summary_json(trace));
    CHECK(j["n"] == 8);
    CHECK(j["sequence"] == "01010101");

    // Deviation sums only grow, and stay within [0, n].
    priors::Interval last{0, 0};
    for (std::size_t n = 1; n <= 8; ++n) {
        const auto d = deviation_sum(trace, n);
        CHECK(d.low <= d.high);
        CHECK(d.low >= last.low);
        CHECK(d.high >= last.high);
        CHECK(d.high <= Rational(static_cast<unsigned long>(n)));
        last = d;
    }
}

TEST_CASE("perfect conditionals give a zero deviation sum")
{
    PredictionTrace t;
    for (std::size_t i = 1; i <= 4; ++i) {
        TraceStep s;
        s.t = i;
        s.actual = i % 2 == 0;
        s.cond[s.actual ? 1 : 0] = priors::Interval{1, 1};
        t.steps.push_back(s);
    }
    const auto d = deviation_sum(t);
    CHECK(d.low == 0);
    CHECK(d.high == 0);
}

TEST_CASE("adversarial sequences are deterministic and always lost")
{
    PredictorOptions o;
    o.k_cap = 18;
    priors::PriorEngine a;
    priors::PriorEngine b;
    const BitString z = adversarial_sequence(a, priors::Kind::Fast, Rational(1, 2), 5, o);
    CHECK(z == adversarial_sequence(b, priors::Kind::Fast, Rational(1, 2), 5, o));
    CHECK(z[0] == true);
    const auto trace = run_on_sequence(a, priors::Kind::Fast, z, Rational(1, 2), LossSpec::zero_one(), o);
    CHECK(trace.errors() == 5);
}
