#pragma once

// Dovetailed exploration of REF-1 programs on the FAST phase schedule.
//
// In phase i every program p with |p| <= i runs for 2^(i-|p|) steps, so a
// computation (p, x) is discovered in phase i iff |p| + log2 t(p, x) <= i.

#include "speedprior/bitstring.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace speedprior::enumerate {

struct ComputationRecord {
    BitString program;
    BitString output;
    std::uint64_t time = 0;
    int first_phase = 0;

    friend bool operator==(const ComputationRecord&, const ComputationRecord&) = default;
    friend std::strong_ordering operator<=>(const ComputationRecord& a, const ComputationRecord& b)
    {
        if (auto c = a.first_phase <=> b.first_phase; c != 0) {
            return c;
        }
        if (auto c = a.program <=> b.program; c != 0) {
            return c;
        }
        return a.output <=> b.output;
    }
};

enum class Mode { Naive, Tree };

struct ComputationLedger {
    int max_phase = 0;
    Mode mode = Mode::Tree;
    /// Sorted by (first_phase, program, output).
    std::vector<ComputationRecord> records;
    /// Steps FAST allots in phases 1..k: sum over i of i*2^i. Naive mode only.
    std::optional<std::uint64_t> naive_step_count;
    /// Instructions actually executed by the simulator.
    std::uint64_t executed_steps = 0;

    std::vector<ComputationRecord> records_for(const BitString& x) const;
};

struct EnumerationOptions {
    int phase_cap = 24;
    unsigned workers = 1;
};

class PhaseCapExceeded : public std::runtime_error {
public:
    PhaseCapExceeded(int requested, int cap);
    int phase() const noexcept { return phase_; }

private:
    int phase_;
};

ComputationLedger enumerate_up_to_phase(int k, Mode mode, const EnumerationOptions& options = {});

/// Least i with time <= 2^(i - program_length). Integer arithmetic only.
int first_phase(std::uint64_t program_length, std::uint64_t time);

/// sum_{i=1..k} i 2^i = 2^(k+1)(k-1) + 2, evaluated directly.
std::uint64_t fast_step_formula(int k);

enum class Exactness { Exact, LowerBoundOnly };

const char* to_string(Exactness e) noexcept;

/// Kt(x) = min |p| + log2 t. When exact, the minimiser is (program_length,
/// time); otherwise Kt(x) > lower_bound.
struct KtValue {
    std::uint64_t program_length = 0;
    std::uint64_t time = 0;
    Exactness status = Exactness::LowerBoundOnly;
    int lower_bound = 0;

    double approx() const;
};

KtValue kt_complexity(const BitString& x, int k_max);

/// Km(x) = min |p| over p -> x. When not exact, Km(x) >= length.
struct KmValue {
    std::uint64_t length = 0;
    Exactness status = Exactness::LowerBoundOnly;
};

KmValue km_complexity(const BitString& x, int k_max);

/// C_t restricted to strings of length <= max_len: strings not computable in
/// time t whose every nonempty proper prefix is. `never_printed` holds the
/// remaining strings of length <= max_len not computable in time t.
struct IncomputablePrefixes {
    std::vector<BitString> minimal;
    std::vector<BitString> never_printed;
};

IncomputablePrefixes incomputable_prefix_set(std::uint64_t t, std::size_t max_len);

/// One JSON object per line: {program, output, time, firstPhase}.
std::string to_json_lines(const ComputationLedger& ledger);

}  // namespace speedprior::enumerate
