// Acceptance suite: end-to-end checks of the model, simulator, calibration,
// mitigation, and multimode engine at their published operating points.
// Prints one PASS/FAIL line per criterion; exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pnr/calibrate.hpp"
#include "pnr/hmm.hpp"
#include "pnr/io.hpp"
#include "pnr/mitigate.hpp"
#include "pnr/multimode.hpp"
#include "pnr/presets.hpp"
#include "pnr/simulate.hpp"
#include "pnr_reference.hpp"

using namespace pnr;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const char* fmt, ...) {
    std::printf("%s criterion %2d: ", pass ? "PASS" : "FAIL", criterion);
    va_list args;
    va_start(args, fmt);
    std::vprintf(fmt, args);
    va_end(args);
    std::printf("\n");
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

ProbVector one_hot(int n, int size) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(size);
    p[n] = 1.0;
    return ProbVector(p, Label::ideal);
}

DetectorParams random_params(int bit_count, std::mt19937_64& gen) {
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    };
    DetectorParams p;
    p.bit_count = bit_count;
    for (int k = 0; k < bit_count; ++k) {
        p.kappa_t.push_back(u(0.0, 0.1));
        p.eps_g.push_back(u(0.0, 0.05));
        p.eps_e.push_back(u(0.0, 0.05));
    }
    p.kappa_t_reset = u(0.0, 0.1);
    return p;
}

// 1. Forward algorithm equals brute-force path enumeration.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(101);
    double worst = 0.0;
    for (int bit_count : {2, 3}) {
        for (int trial = 0; trial < 4; ++trial) {
            const auto params = random_params(bit_count, gen);
            const auto fast = confusion_matrix(params);
            const auto brute = reference::confusion_matrix_pathsum(params);
            worst = std::max(worst, (fast.c - brute).cwiseAbs().maxCoeff());
        }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, worst < 1e-12 && elapsed < 1.0,
           "forward vs path enumeration max |diff| = %.3g (B = 2, 3), %.2f s", worst, elapsed);
}

// 2. Empirical confusion matrix inside the 3-sigma binomial envelope.
void criterion_2() {
    const auto params = presets::fock_detector();
    const auto analytic = confusion_matrix(params);
    const long long shots = 1000000;
    const int n = analytic.n_max();

    int checked = 0, outside = 0;
    double worst_z = 0.0;
    for (int j = 0; j < n; ++j) {
        const auto result = simulate_ensemble(params, presets::default_reset(),
                                              one_hot(j, n), shots,
                                              9000 + static_cast<std::uint64_t>(j));
        for (int i = 0; i < n; ++i) {
            const double p = analytic.c(i, j);
            if (p <= 1e-4) continue;
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
            const double z = std::abs(result.histogram.p[i] - p) / sigma;
            worst_z = std::max(worst_z, z);
            ++checked;
            outside += z > 3.0 ? 1 : 0;
        }
    }
    report(2, outside == 0,
           "10^6 shots/state: %d entries > 1e-4 checked, %d outside 3 sigma (worst z = %.2f)",
           checked, outside, worst_z);
}

// 3. Mean pre-mitigation Fock error from the calibrated parameters.
void criterion_3() {
    const auto c = confusion_matrix(presets::fock_detector());
    const double mean_deficit = 1.0 - c.c.diagonal().mean();
    report(3, std::abs(mean_deficit - 0.135) <= 0.03,
           "mean Fock TVD before mitigation = %.4f (target 0.135 +- 0.03)", mean_deficit);
}

// 4. Post-mitigation mean Fock TVD.
void criterion_4() {
    const auto params = presets::fock_detector();
    const auto c = confusion_matrix(params);
    const auto inversion = invert_confusion(c);
    const long long shots = 100000;

    double total_tvd = 0.0;
    for (int j = 0; j < 16; ++j) {
        const auto result = simulate_ensemble(params, presets::default_reset(),
                                              one_hot(j, 16), shots,
                                              4000 + static_cast<std::uint64_t>(j));
        const auto mitigated = mitigate(inversion, result.histogram);
        total_tvd += tvd(mitigated.mitigated, one_hot(j, 16));
    }
    const double mean_tvd = total_tvd / 16.0;
    report(4, mean_tvd <= 0.015,
           "mean Fock TVD after mitigation = %.4f (threshold 0.015)", mean_tvd);
}

// 5. Information extracted per shot.
void criterion_5() {
    const double calibrated = extracted_bits(confusion_matrix(presets::fock_detector()));

    DetectorParams no_readout_errors = presets::fock_detector_measurement_only();
    no_readout_errors.eps_g = {0, 0, 0, 0};
    no_readout_errors.eps_e = {0, 0, 0, 0};
    const double decay_only = extracted_bits(confusion_matrix(no_readout_errors));

    DetectorParams ideal;
    ideal.bit_count = 4;
    ideal.kappa_t = {0, 0, 0, 0};
    ideal.kappa_t_reset = 0;
    ideal.eps_g = {0, 0, 0, 0};
    ideal.eps_e = {0, 0, 0, 0};
    const double error_free = extracted_bits(confusion_matrix(ideal));

    const bool pass = std::abs(calibrated - 3.14) <= 0.03 &&
                      std::abs(decay_only - 3.72) <= 0.03 && error_free == 4.0;
    report(5, pass,
           "extracted bits: calibrated %.4f (3.14 +- 0.03), decay-only %.4f (3.72 +- 0.03), "
           "error-free %.1f (exactly 4)",
           calibrated, decay_only, error_free);
}

// 6. Raw fidelity floor of the hardest Fock state.
void criterion_6() {
    const auto result = simulate_ensemble(presets::fock_detector(), presets::default_reset(),
                                          one_hot(15, 16), 100000, 615);
    const double p15 = result.histogram.p[15];
    report(6, p15 >= 0.80, "simulated P(outcome 15 | input 15) = %.4f (floor 0.80)", p15);
}

// 7. Condition-number divergence under the joint exposure sweep.
void criterion_7() {
    const std::vector<double> exposures{0.01, 0.02, 0.035, 0.05, 0.08,  0.12,
                                        0.20, 0.30, 0.40,  0.50, 0.60};
    const auto series = condition_sweep(exposures);
    bool monotone = true;
    for (std::size_t k = 1; k < series.size(); ++k)
        monotone = monotone && series[k].condition_number > series[k - 1].condition_number;
    double at_005 = 0.0, at_05 = 0.0;
    for (const auto& pt : series) {
        if (pt.exposure == 0.05) at_005 = pt.condition_number;
        if (pt.exposure == 0.50) at_05 = pt.condition_number;
    }
    report(7, monotone && at_05 >= 10.0 * at_005,
           "cond monotone over [0.01, 0.6]: %s; cond(0.5)/cond(0.05) = %.3g (>= 10)",
           monotone ? "yes" : "no", at_05 / at_005);
}

// 8. Multimode engine against dense Kronecker inversion.
void criterion_8() {
    std::mt19937_64 gen(808);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    };
    auto random_direction = [&](int n, bool zero_diagonal) {
        Eigen::MatrixXd e(n, n);
        double peak = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                e(i, j) = (zero_diagonal && i == j) ? 0.0 : u(-1.0, 1.0);
                peak = std::max(peak, std::abs(e(i, j)));
            }
        return Eigen::MatrixXd(e / peak);
    };

    // Exactness at M = 3, N = 4, q = M.
    std::vector<Eigen::MatrixXd> factors;
    for (int m = 0; m < 3; ++m)
        factors.push_back(Eigen::MatrixXd::Identity(4, 4) + 0.2 * random_direction(4, false));
    const Eigen::MatrixXd dense = reference::dense_kronecker(factors);

    SparseDist meas;
    meas.entries[{0, 1, 2}] = 0.4;
    meas.entries[{3, 3, 3}] = 0.35;
    meas.entries[{1, 0, 2}] = 0.25;
    Eigen::VectorXd p_dense = Eigen::VectorXd::Zero(64);
    for (const auto& [digits, p] : meas.entries)
        p_dense[static_cast<int>(flat_index(MultiIndex{digits}, 4))] = p;
    const Eigen::VectorXd exact = dense * p_dense;

    double worst_element = 0.0;
    for (int flat = 0; flat < 64; ++flat) {
        const auto target = multi_index_from_flat(static_cast<std::uint64_t>(flat), 3, 4);
        worst_element = std::max(
            worst_element, std::abs(mitigate_element(factors, target, meas) - exact[flat]));
    }

    const auto spec_full = make_expansion(factors, 3);
    double worst_column = 0.0;
    for (const auto& [digits, p] : meas.entries) {
        (void)p;
        Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(64);
        for (const auto& [idx, value] : truncated_column(spec_full, MultiIndex{digits}))
            rebuilt[static_cast<int>(flat_index(idx, 4))] = value;
        worst_column = std::max(
            worst_column,
            (rebuilt - dense.col(static_cast<int>(flat_index(MultiIndex{digits}, 4))))
                .cwiseAbs()
                .maxCoeff());
    }

    // Support counts on 100 random instances.
    bool counts_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int modes = 2 + static_cast<int>(gen() % 3);
        const int n_max = 2 + static_cast<int>(gen() % 3);
        const int q = static_cast<int>(gen() % static_cast<std::uint64_t>(modes + 1));
        std::vector<Eigen::MatrixXd> f;
        for (int m = 0; m < modes; ++m)
            f.push_back(Eigen::MatrixXd::Identity(n_max, n_max) +
                        0.3 * random_direction(n_max, false));
        MultiIndex j;
        for (int m = 0; m < modes; ++m)
            j.digits.push_back(static_cast<int>(gen() % static_cast<std::uint64_t>(n_max)));
        const auto column = truncated_column(make_expansion(f, q), j);
        counts_ok = counts_ok && column.size() == entry_count(q, modes, n_max);
    }

    // Omitted column mass at q = 1 shrinks >= 100x when every eps shrinks 10x.
    std::vector<Eigen::MatrixXd> directions;
    for (int m = 0; m < 3; ++m) directions.push_back(random_direction(4, true));
    const MultiIndex j0{{1, 3, 0}};
    double omitted[2];
    for (int scale = 0; scale < 2; ++scale) {
        const double eps = scale == 0 ? 0.05 : 0.005;
        std::vector<Eigen::MatrixXd> f;
        for (const auto& direction : directions)
            f.push_back(Eigen::MatrixXd::Identity(4, 4) + eps * direction);
        Eigen::VectorXd column =
            reference::dense_kronecker(f).col(static_cast<int>(flat_index(j0, 4)));
        for (const auto& [idx, value] : truncated_column(make_expansion(f, 1), j0))
            column[static_cast<int>(flat_index(idx, 4))] -= value;
        omitted[scale] = column.cwiseAbs().sum();
    }
    const double shrink = omitted[0] / omitted[1];

    const bool pass =
        worst_element < 1e-12 && worst_column < 1e-12 && counts_ok && shrink >= 100.0;
    report(8, pass,
           "dense match: element %.2g, column %.2g; support counts %s; q=1 omitted mass "
           "shrink %.0fx (>= 100x)",
           worst_element, worst_column, counts_ok ? "exact" : "MISMATCH", shrink);
}

// 9. Calibration round trips and the coherent-basis failure mode.
void criterion_9() {
    const auto truth = presets::fock_detector();

    double worst_noiseless = 0.0;
    for (int bit = 0; bit < 4; ++bit) {
        const auto cal = synthesize_calibration(truth, bit, 0, 0, truth.kappa_t[0]);
        const auto rates = extract_rates(recover_emission(cal, 16), bit);
        worst_noiseless = std::max(
            worst_noiseless,
            std::max(std::abs(rates.eps_g - truth.eps_g[static_cast<std::size_t>(bit)]),
                     std::abs(rates.eps_e - truth.eps_e[static_cast<std::size_t>(bit)])));
    }

    int within = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const int bit = trial % 4;
        const auto cal = synthesize_calibration(
            truth, bit, 10000, 52000 + static_cast<std::uint64_t>(trial), truth.kappa_t[0]);
        const auto rates = extract_rates(recover_emission(cal, 16), bit);
        const bool ok =
            std::abs(rates.eps_g - truth.eps_g[static_cast<std::size_t>(bit)]) <=
                3.0 * rates.eps_g_err &&
            std::abs(rates.eps_e - truth.eps_e[static_cast<std::size_t>(bit)]) <=
                3.0 * rates.eps_e_err;
        within += ok ? 1 : 0;
    }

    bool coherent_rejected = false;
    {
        std::vector<double> alpha_sq(16);
        for (int j = 0; j < 16; ++j) {
            const double alpha = 3.0 * static_cast<double>(j) / 15.0;
            alpha_sq[static_cast<std::size_t>(j)] = alpha * alpha;
        }
        CalibrationSet cal;
        cal.basis_overlap = coherent_overlap_matrix(alpha_sq, 16);
        cal.prep_exposure = 0.0032;
        const Eigen::MatrixXd t = transition_matrix(cal.prep_exposure, 16).t;
        const EmissionPovm povm = emission_povm(0, truth.eps_g[0], truth.eps_e[0], 16);
        const Eigen::VectorXd p0 = cal.basis_overlap * (t * povm.e0);
        cal.p_cal.resize(2, 16);
        for (int j = 0; j < 16; ++j) {
            cal.p_cal(0, j) = p0[j];
            cal.p_cal(1, j) = 1.0 - p0[j];
        }
        try {
            recover_emission(cal, 16);
        } catch (const IllConditionedBasis&) {
            coherent_rejected = true;
        }
    }

    const bool pass = worst_noiseless < 1e-10 && within >= 198 && coherent_rejected;
    report(9, pass,
           "noiseless max |error| = %.2g; %d/%d trials within 3 SE at 10^4 shots; coherent "
           "basis rejected: %s",
           worst_noiseless, within, trials, coherent_rejected ? "yes" : "no");
}

// 10. Bit-identical shot archives across worker counts.
void criterion_10() {
    const auto params = presets::fock_detector();
    ResetModel reset;
    reset.kind = ResetKind::geometric;
    reset.mean_attempts = 2.05;
    reset.attempt_duration_exposure = 0.0046 / 2.05;
    const auto input = coherent_distribution(4.0, 16).dist;

    EnsembleOptions one_thread;
    one_thread.keep_shots = true;
    one_thread.threads = 1;
    EnsembleOptions many_threads;
    many_threads.keep_shots = true;
    many_threads.threads = 8;
    const auto a = simulate_ensemble(params, reset, input, 20000, 1234, one_thread);
    const auto b = simulate_ensemble(params, reset, input, 20000, 1234, many_threads);
    const bool identical = shots_to_jsonl(a.shots) == shots_to_jsonl(b.shots);
    report(10, identical, "archives byte-identical across 1 and 8 worker threads: %s",
           identical ? "yes" : "no");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%s: %d of 10 criteria failed\n", g_failures == 0 ? "OK" : "NOT OK",
                g_failures);
    return g_failures;
}
