#pragma once

#include <cstdint>
#include <vector>

#include "pnr/fock.hpp"
#include "pnr/params.hpp"
#include "pnr/rng.hpp"

namespace pnr {

enum class ResetKind { constant_exposure, geometric, empirical };

const char* to_string(ResetKind kind);
ResetKind reset_kind_from_string(const std::string& name);

// Stochastic duration of the dynamic ancilla reset, in units of reset
// attempts. The decay exposure added before the next bit is
// attempts * attempt_duration_exposure.
//
//   constant_exposure  deterministic mean_attempts * attempt_duration_exposure,
//                      the same average exposure the analytic model uses
//   geometric          attempts ~ Geometric(1 / mean_attempts)
//   empirical          attempts ~ user-supplied pmf (index k = k+1 attempts),
//                      for feeding in measured reset statistics
struct ResetModel {
    ResetKind kind = ResetKind::constant_exposure;
    double mean_attempts = 2.05;
    double attempt_duration_exposure = 0.0046 / 2.05;
    std::vector<double> empirical_pmf;

    // Optional linear growth of the mean attempt count with photon number,
    // off by default. Applies to constant_exposure and geometric kinds.
    double attempts_per_photon = 0.0;

    // Mean attempt count of the configured law (at zero photons).
    double mean() const;
};

// Throws DomainError unless the configured distribution reproduces
// mean_attempts within 1e-6 and the pmf (if any) is a distribution.
void validate(const ResetModel& reset);

// One complete measurement of all B bits.
struct ShotRecord {
    int true_initial = 0;
    std::vector<int> bits;               // outcome of bit k, LSB first
    int outcome = 0;                     // sum bits[k] * 2^k
    std::vector<int> reset_attempts;     // attempts after bit k read 1, else 0
    std::vector<int> hidden_trajectory;  // photon number before and after each bit; non-increasing
};

// Simulates one shot: for each bit, binomial photon decay over the bit's
// exposure (plus the sampled reset exposure when the previous bit read 1),
// then the true bit of the current hidden state flipped with eps_g / eps_e.
ShotRecord simulate_shot(const DetectorParams& params, const ResetModel& reset,
                         int initial, RngStream& rng);

struct EnsembleOptions {
    bool keep_shots = false;  // retain per-shot records (required for archives)
    int threads = 0;          // 0 = library default worker count
};

struct EnsembleResult {
    ProbVector histogram;          // outcome frequencies, label measured
    std::vector<ShotRecord> shots; // empty unless keep_shots
    long long shot_count = 0;
};

// Draws initial states i.i.d. from p_initial and aggregates outcome counts.
// Per-shot RNG streams are derived from (seed, shot index), so the result is
// bit-identical for any thread count.
EnsembleResult simulate_ensemble(const DetectorParams& params, const ResetModel& reset,
                                 const ProbVector& p_initial, long long shots,
                                 std::uint64_t seed, const EnsembleOptions& options = {});

// Single-bit calibration shot: decay over prep_exposure, then one emission of
// the requested bit. Record has bits/reset_attempts of length 1 and
// hidden_trajectory of length 2.
ShotRecord simulate_single_bit_shot(const DetectorParams& params, double prep_exposure,
                                    int bit, int initial, RngStream& rng);

}  // namespace pnr
