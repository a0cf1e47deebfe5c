#include "pnr/simulate.hpp"

#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pnr {

const char* to_string(ResetKind kind) {
    switch (kind) {
        case ResetKind::constant_exposure: return "constant_exposure";
        case ResetKind::geometric: return "geometric";
        case ResetKind::empirical: return "empirical";
    }
    return "constant_exposure";
}

ResetKind reset_kind_from_string(const std::string& name) {
    if (name == "constant_exposure" || name == "constant") return ResetKind::constant_exposure;
    if (name == "geometric") return ResetKind::geometric;
    if (name == "empirical") return ResetKind::empirical;
    throw DomainError("unknown reset model kind: " + name);
}

double ResetModel::mean() const {
    if (kind == ResetKind::empirical) {
        double m = 0.0;
        for (std::size_t k = 0; k < empirical_pmf.size(); ++k)
            m += empirical_pmf[k] * static_cast<double>(k + 1);
        return m;
    }
    return mean_attempts;
}

void validate(const ResetModel& reset) {
    if (!(reset.mean_attempts >= 1.0))
        throw DomainError("ResetModel: mean_attempts must be >= 1");
    if (!(reset.attempt_duration_exposure >= 0.0))
        throw DomainError("ResetModel: attempt_duration_exposure must be >= 0");
    if (reset.attempts_per_photon < 0.0)
        throw DomainError("ResetModel: attempts_per_photon must be >= 0");
    if (reset.kind == ResetKind::empirical) {
        if (reset.empirical_pmf.empty())
            throw DomainError("ResetModel: empirical kind requires a pmf");
        double sum = 0.0;
        for (double p : reset.empirical_pmf) {
            if (p < 0.0)
                throw DomainError("ResetModel: pmf entries must be >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DomainError("ResetModel: pmf must sum to 1");
        if (std::abs(reset.mean() - reset.mean_attempts) > 1e-6)
            throw DomainError("ResetModel: pmf mean does not reproduce mean_attempts");
    }
}

namespace {

struct ResetDraw {
    int attempts = 0;
    double exposure = 0.0;
};

// Sample the reset following a bit that read 1, with the hidden state at
// n photons. constant_exposure consumes no randomness.
ResetDraw draw_reset(const ResetModel& reset, int photons, RngStream& rng) {
    const double mean_n =
        reset.mean_attempts + reset.attempts_per_photon * static_cast<double>(photons);
    ResetDraw out;
    switch (reset.kind) {
        case ResetKind::constant_exposure:
            out.attempts = 1;
            out.exposure = mean_n * reset.attempt_duration_exposure;
            break;
        case ResetKind::geometric:
            out.attempts = rng.geometric(1.0 / mean_n);
            out.exposure = out.attempts * reset.attempt_duration_exposure;
            break;
        case ResetKind::empirical: {
            double acc = 0.0;
            const double u = rng.uniform();
            out.attempts = static_cast<int>(reset.empirical_pmf.size());
            for (std::size_t k = 0; k < reset.empirical_pmf.size(); ++k) {
                acc += reset.empirical_pmf[k];
                if (u < acc) {
                    out.attempts = static_cast<int>(k) + 1;
                    break;
                }
            }
            out.exposure = out.attempts * reset.attempt_duration_exposure;
            break;
        }
    }
    return out;
}

// Core shot loop; fills `record` when non-null. Draw order per bit is fixed:
// reset attempts (if the previous bit read 1), then one survival trial per
// photon, then the emission flip.
int run_shot(const DetectorParams& params, const ResetModel& reset, int initial,
             RngStream& rng, ShotRecord* record) {
    const int B = params.bit_count;
    int state = initial;
    int outcome = 0;
    int prev_bit = 0;

    if (record) {
        record->true_initial = initial;
        record->bits.assign(B, 0);
        record->reset_attempts.assign(B, 0);
        record->hidden_trajectory.assign(B + 1, initial);
    }

    for (int k = 0; k < B; ++k) {
        double exposure = params.kappa_t[k];
        if (k > 0 && prev_bit == 1) {
            const ResetDraw r = draw_reset(reset, state, rng);
            exposure += r.exposure;
            if (record) record->reset_attempts[k - 1] = r.attempts;
        }

        state = rng.binomial(state, std::exp(-exposure));

        const int true_bit = (state >> k) & 1;
        int bit;
        if (true_bit == 0)
            bit = rng.bernoulli(params.eps_g[k]) ? 1 : 0;
        else
            bit = rng.bernoulli(params.eps_e[k]) ? 0 : 1;

        outcome |= bit << k;
        prev_bit = bit;
        if (record) {
            record->bits[k] = bit;
            record->hidden_trajectory[k + 1] = state;
        }
    }

    // A final 1 still triggers a reset before the detector is reused.
    if (prev_bit == 1) {
        const ResetDraw r = draw_reset(reset, state, rng);
        if (record) record->reset_attempts[B - 1] = r.attempts;
    }

    if (record) record->outcome = outcome;
    return outcome;
}

}  // namespace

ShotRecord simulate_shot(const DetectorParams& params, const ResetModel& reset,
                         int initial, RngStream& rng) {
    validate(params);
    validate(reset);
    if (initial < 0 || initial >= params.n_max())
        throw DomainError("simulate_shot: initial state outside [0, 2^B)");
    ShotRecord record;
    run_shot(params, reset, initial, rng, &record);
    return record;
}

EnsembleResult simulate_ensemble(const DetectorParams& params, const ResetModel& reset,
                                 const ProbVector& p_initial, long long shots,
                                 std::uint64_t seed, const EnsembleOptions& options) {
    validate(params);
    validate(reset);
    if (shots < 1)
        throw DomainError("simulate_ensemble: shots must be >= 1");
    if (p_initial.p.size() != params.n_max())
        throw DomainError("simulate_ensemble: initial distribution length must be 2^B");
    validate(p_initial);

    const int n_max = params.n_max();
    std::vector<double> cumulative(n_max);
    double acc = 0.0;
    for (int k = 0; k < n_max; ++k) {
        acc += p_initial.p[k];
        cumulative[k] = acc;
    }

    EnsembleResult result;
    result.shot_count = shots;
    if (options.keep_shots)
        result.shots.resize(static_cast<std::size_t>(shots));

    std::vector<long long> counts(n_max, 0);

#ifdef _OPENMP
    const int workers = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel num_threads(workers)
    {
        std::vector<long long> local(n_max, 0);
#pragma omp for schedule(static)
        for (long long s = 0; s < shots; ++s) {
            RngStream rng = shot_stream(seed, static_cast<std::uint64_t>(s));
            const int initial = rng.categorical(cumulative);
            ShotRecord* rec =
                options.keep_shots ? &result.shots[static_cast<std::size_t>(s)] : nullptr;
            local[run_shot(params, reset, initial, rng, rec)] += 1;
        }
#pragma omp critical
        for (int k = 0; k < n_max; ++k) counts[k] += local[k];
    }
#else
    for (long long s = 0; s < shots; ++s) {
        RngStream rng = shot_stream(seed, static_cast<std::uint64_t>(s));
        const int initial = rng.categorical(cumulative);
        ShotRecord* rec =
            options.keep_shots ? &result.shots[static_cast<std::size_t>(s)] : nullptr;
        counts[run_shot(params, reset, initial, rng, rec)] += 1;
    }
#endif

    Eigen::VectorXd hist(n_max);
    for (int k = 0; k < n_max; ++k)
        hist[k] = static_cast<double>(counts[k]) / static_cast<double>(shots);
    result.histogram = ProbVector(std::move(hist), Label::measured);
    return result;
}

ShotRecord simulate_single_bit_shot(const DetectorParams& params, double prep_exposure,
                                    int bit, int initial, RngStream& rng) {
    if (bit < 0 || bit >= params.bit_count)
        throw DomainError("simulate_single_bit_shot: bit outside [0, B)");
    if (initial < 0 || initial >= params.n_max())
        throw DomainError("simulate_single_bit_shot: initial state outside [0, 2^B)");
    if (!(prep_exposure >= 0.0))
        throw DomainError("simulate_single_bit_shot: prep exposure must be >= 0");

    ShotRecord record;
    record.true_initial = initial;
    const int after = rng.binomial(initial, std::exp(-prep_exposure));
    const int true_bit = (after >> bit) & 1;
    int b;
    if (true_bit == 0)
        b = rng.bernoulli(params.eps_g[bit]) ? 1 : 0;
    else
        b = rng.bernoulli(params.eps_e[bit]) ? 0 : 1;
    record.bits = {b};
    record.outcome = b;
    record.reset_attempts = {0};
    record.hidden_trajectory = {initial, after};
    return record;
}

}  // namespace pnr
