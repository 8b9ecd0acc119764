#include "oracle/ref1_oracle.hpp"

#include "speedprior/enumerate.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace speedprior;
using enumerate::Mode;

namespace {

std::vector<oracle::Record> as_oracle(const enumerate::ComputationLedger& l)
{
    std::vector<oracle::Record> out;
    for (const auto& r : l.records) {
        out.push_back({r.program.text(), r.output.text(), r.time, r.first_phase});
    }
    return out;
}

}  // namespace

TEST_CASE("naive step accounting matches the closed form")
{
    CHECK(enumerate::enumerate_up_to_phase(1, Mode::Naive).naive_step_count == 2);
    CHECK(enumerate::enumerate_up_to_phase(3, Mode::Naive).naive_step_count == 34);
    for (int k = 1; k <= 12; ++k) {
        const auto expected = (std::uint64_t{1} << (k + 1)) * static_cast<std::uint64_t>(k - 1) + 2;
        CHECK(enumerate::enumerate_up_to_phase(k, Mode::Naive).naive_step_count == expected);
        CHECK(enumerate::fast_step_formula(k) == expected);
    }
}

TEST_CASE("phase 3 ledger")
{
    const auto l = enumerate::enumerate_up_to_phase(3, Mode::Tree);
    const enumerate::ComputationRecord out0{BitString("100"), BitString("0"), 1, 3};
    CHECK(std::find(l.records.begin(), l.records.end(), out0) != l.records.end());
    for (const auto& r : l.records) {
        CHECK_FALSE((r.program == BitString("100") && r.output == BitString("1")));
    }
}

TEST_CASE("naive and tree modes agree, for any worker count")
{
    CHECK(enumerate::enumerate_up_to_phase(8, Mode::Naive).records == enumerate::enumerate_up_to_phase(8, Mode::Tree).records);
    enumerate::EnumerationOptions four;
    four.workers = 4;
    CHECK(enumerate::enumerate_up_to_phase(13, Mode::Tree, four).records ==
          enumerate::enumerate_up_to_phase(13, Mode::Tree).records);
}

TEST_CASE("tree ledger equals brute force over all programs")
{
    for (const int k : {6, 10, 15}) {
        CHECK(as_oracle(enumerate::enumerate_up_to_phase(k, Mode::Tree)) == oracle::ledger(k));
    }
}

TEST_CASE("ledgers grow with k")
{
    auto prev = enumerate::enumerate_up_to_phase(1, Mode::Tree).records;
    for (int k = 2; k <= 12; ++k) {
        const auto next = enumerate::enumerate_up_to_phase(k, Mode::Tree).records;
        for (const auto& r : prev) {
            CHECK(std::find(next.begin(), next.end(), r) != next.end());
        }
        prev = next;
    }
}

TEST_CASE("phase cap")
{
    enumerate::EnumerationOptions o;
    o.phase_cap = 5;
    try {
        enumerate::enumerate_up_to_phase(6, Mode::Tree, o);
        FAIL("expected PhaseCapExceeded");
    } catch (const enumerate::PhaseCapExceeded& e) {
        CHECK(e.phase() == 6);
    }
}

TEST_CASE("first phase")
{
    CHECK(enumerate::first_phase(3, 1) == 3);
    CHECK(enumerate::first_phase(3, 2) == 4);
    CHECK(enumerate::first_phase(6, 5) == 9);
    for (std::uint64_t len = 3; len <= 30; len += 3) {
        for (std::uint64_t t = 1; t < 5000; t += 7) {
            CHECK(enumerate::first_phase(len, t) == oracle::first_phase(len, t));
        }
    }
}

TEST_CASE("Kt and Km of short strings")
{
    const auto kt0 = enumerate::kt_complexity(BitString("0"), 8);
    CHECK(kt0.status == enumerate::Exactness::Exact);
    CHECK(kt0.program_length == 3);
    CHECK(kt0.time == 1);
    const auto kt1 = enumerate::kt_complexity(BitString("1"), 8);
    CHECK(kt1.status == enumerate::Exactness::Exact);
    CHECK(kt1.program_length == 6);
    CHECK(kt1.time == 2);
    CHECK(kt1.approx() == doctest::Approx(7.0));
    CHECK(enumerate::kt_complexity(BitString("0"), 0).status == enumerate::Exactness::LowerBoundOnly);

    const auto km0 = enumerate::km_complexity(BitString("0"), 8);
    CHECK(km0.status == enumerate::Exactness::Exact);
    CHECK(km0.length == 3);
    const auto km1 = enumerate::km_complexity(BitString("1"), 8);
    CHECK(km1.status == enumerate::Exactness::Exact);
    CHECK(km1.length == 6);
}

TEST_CASE("Kt agrees with the brute-force ledger")
{
    const auto recs = oracle::ledger(15);
    for (const std::string x : {"0", "1", "00", "01", "10", "11", "010", "0101"}) {
        // Least |p| + log2 t, compared as |p| + log2 t < |q| + log2 u.
        const oracle::Record* best = nullptr;
        auto smaller = [](const oracle::Record& a, const oracle::Record& b) {
            // 2^|a| t_a < 2^|b| t_b
            const mpz_class lhs = mpz_class(static_cast<unsigned long>(a.time)) << static_cast<mp_bitcnt_t>(a.program.size());
            const mpz_class rhs = mpz_class(static_cast<unsigned long>(b.time)) << static_cast<mp_bitcnt_t>(b.program.size());
            return lhs < rhs;
        };
        for (const auto& r : recs) {
            if (r.output == x && (!best || smaller(r, *best))) {
                best = &r;
            }
        }
        const auto kt = enumerate::kt_complexity(BitString(x), 15);
        if (best) {
            CHECK(kt.status == enumerate::Exactness::Exact);
            CHECK((mpz_class(static_cast<unsigned long>(kt.time)) << static_cast<mp_bitcnt_t>(kt.program_length)) ==
                  (mpz_class(static_cast<unsigned long>(best->time)) << static_cast<mp_bitcnt_t>(best->program.size())));
        } else {
            CHECK(kt.status == enumerate::Exactness::LowerBoundOnly);
        }
    }
}

TEST_CASE("incomputable prefix sets")
{
    const auto c1 = enumerate::incomputable_prefix_set(1, 1);
    CHECK(c1.minimal == std::vector<BitString>{BitString("1")});

    for (const std::uint64_t t : {1, 2, 4}) {
        const std::size_t max_len = 4;
        const auto c = enumerate::incomputable_prefix_set(t, max_len);
        // Brute force: a program printing within t steps reads at most 3t bits.
        std::set<std::string> computable;
        for (std::size_t len = 3; len <= 3 * t; len += 3) {
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
                const std::string p = oracle::bits(code, len);
                for (const auto& pr : oracle::run(p, t)) {
                    if (pr.consumed == len && pr.output.size() <= max_len) {
                        computable.insert(pr.output);
                    }
                }
            }
        }
        std::vector<BitString> expected;
        for (std::size_t len = 1; len <= max_len; ++len) {
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
                const std::string y = oracle::bits(code, len);
                bool ok = !computable.count(y);
                for (std::size_t m = 1; m < len && ok; ++m) {
                    ok = computable.count(y.substr(0, m)) != 0;
                }
                if (ok) {
                    expected.emplace_back(y);
                }
            }
        }
        CHECK(c.minimal == expected);
        for (const auto& a : c.minimal) {
            for (const auto& b : c.minimal) {
                CHECK_FALSE(a.is_proper_prefix_of(b));
            }
        }
    }
}

TEST_CASE("with a generous budget only never-printed strings remain")
{
    // t = 8 is far below 2^(3 maxLen) for maxLen = 2, but every 1- and 2-bit
    // string is printable within 8 steps.
    const auto c = enumerate::incomputable_prefix_set(8, 2);
    CHECK(c.minimal.empty());
    CHECK(c.never_printed.empty());
}

TEST_CASE("ledger JSON lines")
{
    const auto l = enumerate::enumerate_up_to_phase(3, Mode::Tree);
    const std::string lines = enumerate::to_json_lines(l);
    CHECK(lines.find("\"program\":\"100\"") != std::string::npos);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == static_cast<long>(l.records.size()));
}
