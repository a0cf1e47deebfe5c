#include "pnr/calibrate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "pnr/fock.hpp"
#include "pnr/rng.hpp"
#include "pnr/simulate.hpp"

namespace pnr {

void validate(const CalibrationSet& cal) {
    const int n_basis = cal.n_basis();
    if (n_basis < 1)
        throw DomainError("CalibrationSet: empty basis");
    if (cal.p_cal.rows() != 2 || cal.p_cal.cols() != n_basis)
        throw DomainError("CalibrationSet: p_cal must be 2 x N_basis");
    for (int j = 0; j < n_basis; ++j) {
        if (std::abs(cal.basis_overlap.row(j).sum() - 1.0) > 1e-9)
            throw DomainError("CalibrationSet: overlap row " + std::to_string(j) +
                              " does not sum to 1");
        if (std::abs(cal.p_cal(0, j) + cal.p_cal(1, j) - 1.0) > 1e-12)
            throw DomainError("CalibrationSet: p_cal column " + std::to_string(j) +
                              " does not sum to 1");
    }
    if (!(cal.prep_exposure >= 0.0))
        throw DomainError("CalibrationSet: prep_exposure must be >= 0");
    if (cal.p_cal_variance.size() != 0 &&
        (cal.p_cal_variance.rows() != 2 || cal.p_cal_variance.cols() != n_basis))
        throw DomainError("CalibrationSet: p_cal_variance must be 2 x N_basis");
}

EmissionRecovery recover_emission(const CalibrationSet& cal, int n_max,
                                  double cond_threshold) {
    validate(cal);
    if (cal.basis_overlap.cols() != n_max)
        throw DomainError("recover_emission: overlap matrix must have n_max columns");
    if (cal.n_basis() != n_max)
        throw DomainError("recover_emission: basis must be complete (N_basis == n_max)");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cal.basis_overlap);
    const auto& sv = svd.singularValues();
    const double cond =
        sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
    if (!(cond <= cond_threshold)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "calibration basis is ill-conditioned: cond(O) = %.6g exceeds threshold %.6g",
                      cond, cond_threshold);
        throw IllConditionedBasis(msg, cond, cond_threshold);
    }

    const Eigen::MatrixXd t = transition_matrix(cal.prep_exposure, n_max).t;
    // solve_map = T^{-1} O^{-1}; kept whole for exact error propagation.
    const Eigen::MatrixXd o_inv =
        cal.basis_overlap.partialPivLu().solve(Eigen::MatrixXd::Identity(n_max, n_max));
    const Eigen::MatrixXd solve_map = t.partialPivLu().solve(o_inv);

    EmissionRecovery out;
    out.solve_map = solve_map;
    out.e0 = solve_map * cal.p_cal.row(0).transpose();
    out.e1 = solve_map * cal.p_cal.row(1).transpose();
    out.basis_condition = cond;
    if (cal.p_cal_variance.size() != 0)
        out.p_cal_variance = cal.p_cal_variance;
    else
        out.p_cal_variance = Eigen::MatrixXd::Zero(2, n_max);
    return out;
}

RateEstimate extract_rates(const EmissionRecovery& recovery, int bit) {
    const int n_max = static_cast<int>(recovery.e0.size());
    if (bit < 0)
        throw DomainError("extract_rates: bit index must be >= 0");

    std::vector<int> even_states, odd_states;
    for (int i = 0; i < n_max; ++i) {
        if (((i >> bit) & 1) == 0)
            even_states.push_back(i);
        else
            odd_states.push_back(i);
    }
    if (even_states.empty() || odd_states.empty())
        throw DomainError("extract_rates: bit " + std::to_string(bit) +
                          " has an empty parity class below n_max");

    // Mean over a class is a linear functional of p_cal; its variance is the
    // weighted sum of the per-entry sampling variances.
    auto class_mean = [&](const Eigen::VectorXd& estimates, const std::vector<int>& states,
                          int p_row) {
        const double inv_n = 1.0 / static_cast<double>(states.size());
        double mean = 0.0;
        for (int i : states) mean += estimates[i];
        mean *= inv_n;

        Eigen::VectorXd weights = Eigen::VectorXd::Zero(n_max);
        for (int i : states) weights += recovery.solve_map.row(i).transpose();
        weights *= inv_n;
        double variance = 0.0;
        for (int j = 0; j < n_max; ++j)
            variance += weights[j] * weights[j] * recovery.p_cal_variance(p_row, j);
        return std::pair<double, double>(mean, std::sqrt(variance));
    };

    RateEstimate out;
    std::tie(out.eps_g, out.eps_g_err) = class_mean(recovery.e1, even_states, 1);
    std::tie(out.eps_e, out.eps_e_err) = class_mean(recovery.e0, odd_states, 0);
    return out;
}

CalibrationSet synthesize_calibration(const DetectorParams& truth, int bit,
                                      long long shots, std::uint64_t seed,
                                      double prep_exposure) {
    validate(truth);
    if (bit < 0 || bit >= truth.bit_count)
        throw DomainError("synthesize_calibration: bit outside [0, B)");
    const int n_max = truth.n_max();

    CalibrationSet cal;
    cal.basis_overlap = Eigen::MatrixXd::Identity(n_max, n_max);
    cal.prep_exposure = prep_exposure;
    cal.p_cal.resize(2, n_max);

    if (shots <= 0) {
        const Eigen::MatrixXd t = transition_matrix(prep_exposure, n_max).t;
        const EmissionPovm povm = emission_povm(bit, truth.eps_g[bit], truth.eps_e[bit], n_max);
        const Eigen::VectorXd p0 = t * povm.e0;
        for (int j = 0; j < n_max; ++j) {
            cal.p_cal(0, j) = p0[j];
            cal.p_cal(1, j) = 1.0 - p0[j];
        }
        cal.p_cal_variance = Eigen::MatrixXd::Zero(2, n_max);
        return cal;
    }

    cal.p_cal_variance.resize(2, n_max);
    for (int j = 0; j < n_max; ++j) {
        long long zeros = 0;
        for (long long s = 0; s < shots; ++s) {
            RngStream rng = shot_stream(seed + static_cast<std::uint64_t>(j) * 0x51ED2701ull,
                                        static_cast<std::uint64_t>(s));
            const ShotRecord rec = simulate_single_bit_shot(truth, prep_exposure, bit, j, rng);
            zeros += rec.outcome == 0 ? 1 : 0;
        }
        const double p0 = static_cast<double>(zeros) / static_cast<double>(shots);
        cal.p_cal(0, j) = p0;
        cal.p_cal(1, j) = 1.0 - p0;
        const double var = p0 * (1.0 - p0) / static_cast<double>(shots);
        cal.p_cal_variance(0, j) = var;
        cal.p_cal_variance(1, j) = var;
    }
    return cal;
}

Eigen::MatrixXd coherent_overlap_matrix(const std::vector<double>& alpha_sq, int n_max) {
    Eigen::MatrixXd overlap(static_cast<int>(alpha_sq.size()), n_max);
    for (std::size_t j = 0; j < alpha_sq.size(); ++j)
        overlap.row(static_cast<int>(j)) = coherent_distribution(alpha_sq[j], n_max).dist.p;
    return overlap;
}

}  // namespace pnr
