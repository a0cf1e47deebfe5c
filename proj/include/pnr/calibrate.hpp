#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "pnr/hmm.hpp"
#include "pnr/params.hpp"

namespace pnr {

// Single-bit calibration data on a basis of prepared states.
// basis_overlap(j, m) = |<psi_j|m>|^2 maps the calibration basis to the Fock
// basis; p_cal(b, j) = observed P(bit = b | psi_j). p_cal_variance carries the
// per-entry sampling variance of p_cal (empty or zero when noiseless).
struct CalibrationSet {
    Eigen::MatrixXd basis_overlap;  // N_basis x N
    Eigen::MatrixXd p_cal;          // 2 x N_basis
    double prep_exposure = 0.0040;  // decay exposure covering preparation check + mapping pulse
    Eigen::MatrixXd p_cal_variance; // 2 x N_basis, optional

    int n_basis() const { return static_cast<int>(basis_overlap.rows()); }
};

void validate(const CalibrationSet& cal);

// Recovered emission diagonals for one bit, with the linear solve map kept
// for exact propagation of the p_cal sampling errors.
struct EmissionRecovery {
    Eigen::VectorXd e0;             // P(read 0 | i photons) estimates
    Eigen::VectorXd e1;
    Eigen::MatrixXd solve_map;      // T^{-1}(prep) * O^{-1}
    Eigen::MatrixXd p_cal_variance; // as provided (zeros when absent)
    double basis_condition = 1.0;   // cond(O)
};

// Solves e_b = T^{-1}(prep_exposure) O^{-1} p_cal[b] for both bit values.
// Throws IllConditionedBasis when cond(O) exceeds the threshold, naming the
// offending condition number.
EmissionRecovery recover_emission(const CalibrationSet& cal, int n_max,
                                  double cond_threshold = 1e6);

struct RateEstimate {
    double eps_g = 0.0;
    double eps_g_err = 0.0;
    double eps_e = 0.0;
    double eps_e_err = 0.0;
};

// eps_g = mean of e1 over states whose bit is 0; eps_e = mean of e0 over
// states whose bit is 1. Uncertainties are the standard errors of those
// means, propagated linearly from the p_cal sampling variances.
RateEstimate extract_rates(const EmissionRecovery& recovery, int bit);

// Synthesizes a Fock-basis calibration set from known detector parameters.
// shots == 0 gives the exact analytic p_cal (zero variance); shots > 0
// samples each prepared state and records plug-in binomial variances.
CalibrationSet synthesize_calibration(const DetectorParams& truth, int bit,
                                      long long shots, std::uint64_t seed,
                                      double prep_exposure);

// Overlap matrix of a coherent calibration basis: row j is the truncated,
// renormalized Poisson distribution with mean alpha_sq[j].
Eigen::MatrixXd coherent_overlap_matrix(const std::vector<double>& alpha_sq, int n_max);

}  // namespace pnr
