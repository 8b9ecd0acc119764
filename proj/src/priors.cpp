#include "speedprior/priors.hpp"

#include "speedprior/enumerate.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cctype>

namespace speedprior::priors {

const char* to_string(Kind kind) noexcept { return kind == Kind::Kt ? "Kt" : "Fast"; }

Kind parse_kind(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "kt") {
        return Kind::Kt;
    }
    if (lower == "fast") {
        return Kind::Fast;
    }
    throw std::invalid_argument("unknown prior kind '" + std::string(text) + "' (expected kt or fast)");
}

namespace {

nlohmann::ordered_json rational_json(const Rational& q)
{
    nlohmann::ordered_json j;
    j["num"] = numerator_string(q);
    j["den"] = denominator_string(q);
    return j;
}

// Least e with t <= 2^e.
long ceil_log2(std::uint64_t t) { return t <= 1 ? 0 : static_cast<long>(std::bit_width(t - 1)); }

}  // namespace

std::string to_json(const PriorEstimate& e)
{
    nlohmann::ordered_json j;
    j["kind"] = to_string(e.kind);
    j["x"] = e.target.text();
    j["lower"] = rational_json(e.lower);
    j["tail"] = rational_json(e.tail);
    j["k"] = e.phases_used;
    j["epsilon"] = rational_json(e.epsilon);
    j["certified"] = e.certified;
    if (!e.diagnostic.empty()) {
        j["diagnostic"] = e.diagnostic;
    }
    return j.dump();
}

PriorEngine::PriorEngine(EngineOptions options) : options_(options) {}

void PriorEngine::set_horizon(BitString z) { horizon_ = std::move(z); }

BitString PriorEngine::target_for(const BitString& x) const
{
    if (!horizon_.empty() && search::Filter::along(horizon_).admits(x)) {
        return horizon_;
    }
    // Along x minus its last bit: one search serves x, its sibling and its
    // prefixes, which is what a conditional needs.
    return x.prefix(x.size() - 1);
}

const search::SearchResult& PriorEngine::search_for(const BitString& x, int k)
{
    if (k > options_.phase_cap) {
        throw enumerate::PhaseCapExceeded(k, options_.phase_cap);
    }
    const BitString target = target_for(x);
    auto& slot = cache_[{target, k}];
    if (!slot) {
        slot = std::make_unique<search::SearchResult>(
            search::explore(search::Budget::phase(k), search::Filter::along(target)));
        ++searches_run_;
    }
    return *slot;
}

PriorEstimate PriorEngine::at_phase(Kind kind, const BitString& x, int k)
{
    PriorEstimate e;
    e.kind = kind;
    e.target = x;
    e.phases_used = k;
    if (x.empty()) {
        e.lower = 1;
        e.tail = 0;
        return e;
    }
    if (k <= 0) {
        e.lower = 0;
        e.tail = 1;
        return e;
    }
    const auto& result = search_for(x, k);
    Rational found_mass = 0;
    for (const auto& c : result.computations(x)) {
        const Rational weight = Rational(static_cast<unsigned long>(c.multiplicity)) * pow2(-static_cast<long>(c.program_length));
        found_mass += weight;
        if (kind == Kind::Kt) {
            e.lower += weight / Rational(static_cast<unsigned long>(c.time));
        } else {
            const int fp = enumerate::first_phase(c.program_length, c.time);
            e.lower += weight * (pow2(1 - fp) - pow2(-k));
        }
    }
    Rational below = 0;
    for (const auto& f : result.frontier()) {
        if (f.output.size() >= x.size()) {
            continue;
        }
        const std::uint64_t min_time = f.next_step + (x.size() - f.output.size() - 1);
        const Rational mass = Rational(static_cast<unsigned long>(f.multiplicity)) * pow2(-static_cast<long>(f.consumed));
        if (kind == Kind::Kt) {
            below += mass * pow2(-(ceil_log2(min_time + 1) - 1));
        } else {
            below += mass * pow2(1 - static_cast<long>(f.min_length) - ceil_log2(min_time));
        }
    }
    if (kind == Kind::Kt) {
        e.tail = below;
    } else {
        e.tail = std::min(pow2(-k), Rational(found_mass * pow2(-k) + below));
    }
    return e;
}

PriorEstimate PriorEngine::estimate(Kind kind, const BitString& x, const Rational& epsilon, int k_cap)
{
    if (epsilon <= 0 || epsilon >= 1) {
        throw std::invalid_argument("epsilon must lie strictly between 0 and 1");
    }
    if (x.empty()) {
        PriorEstimate e = at_phase(kind, x, 0);
        e.epsilon = epsilon;
        e.certified = true;
        return e;
    }
    if (k_cap < 1) {
        throw std::invalid_argument("k cap must be at least 1");
    }
    PriorEstimate e;
    for (int k = 1; k <= k_cap; ++k) {
        e = at_phase(kind, x, k);
        e.epsilon = epsilon;
        if (e.lower > 0 && e.tail <= epsilon * e.lower) {
            e.certified = true;
            return e;
        }
    }
    e.diagnostic = "phase cap " + std::to_string(k_cap) + " reached with tail/lower " +
                   (e.lower > 0 ? speedprior::to_string(Rational(e.tail / e.lower)) : std::string("unbounded"));
    return e;
}

Interval PriorEngine::conditional(Kind kind, const BitString& prefix, bool bit, const Rational& epsilon, int k_cap)
{
    const PriorEstimate joint = estimate(kind, prefix.appended(bit), epsilon, k_cap);
    const PriorEstimate given = estimate(kind, prefix, epsilon, k_cap);
    if (given.lower == 0) {
        throw InsufficientPhases("no computation of " + prefix.text() + " found within " +
                                 std::to_string(given.phases_used) + " phases");
    }
    return {joint.lower / given.upper(), joint.upper() / given.lower};
}

Rational PriorEngine::defining_form_sum(Kind kind, const BitString& x, int k)
{
    return at_phase(kind, x, k).lower;
}

Rational PriorEngine::alternate_form_sum(Kind kind, const BitString& x, int k)
{
    Rational sum = 0;
    if (x.empty() || k <= 0) {
        return sum;
    }
    for (const auto& c : search_for(x, k).computations(x)) {
        const Rational mult(static_cast<unsigned long>(c.multiplicity));
        if (kind == Kind::Fast) {
            sum += mult * pow2(-2 * static_cast<long>(c.program_length)) / Rational(static_cast<unsigned long>(c.time));
        } else {
            const int fp = enumerate::first_phase(c.program_length, c.time);
            sum += mult * (pow2(1 - fp) - pow2(-k));
        }
    }
    return sum;
}

Rational PriorEngine::kraft_sum(const BitString& x, int k)
{
    Rational sum = 0;
    if (x.empty() || k <= 0) {
        return sum;
    }
    for (const auto& c : search_for(x, k).computations(x)) {
        sum += Rational(static_cast<unsigned long>(c.multiplicity)) * pow2(-static_cast<long>(c.program_length));
    }
    return sum;
}

}  // namespace speedprior::priors
