#pragma once

#include <vector>

#include <Eigen/Core>

#include "pnr/hmm.hpp"

namespace pnr {

struct InversionReport {
    Eigen::MatrixXd inverse;
    double condition_number = 1.0;  // ratio of largest to smallest singular value
    double residual_max = 0.0;      // max-norm of C * C^{-1} - I
};

// Inverts the confusion matrix via pivoted LU; condition number from singular
// values. Throws IllConditioned when cond exceeds the threshold.
InversionReport invert_confusion(const ConfusionMatrix& c, double cond_threshold = 1e6);

struct MitigationResult {
    ProbVector mitigated;        // projected onto the probability simplex
    ProbVector raw;              // C^{-1} p_meas, may carry negative entries
    double residual_norm = 0.0;  // Euclidean distance moved by the projection
};

MitigationResult mitigate(const InversionReport& inv, const ProbVector& p_meas);
MitigationResult mitigate(const Eigen::MatrixXd& c_inverse, const ProbVector& p_meas);

// Euclidean projection onto { x : x >= 0, sum x = 1 } by sort and threshold.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

// Average number of bits a single shot extracts: B minus the mean posterior
// entropy of the input given the outcome, under a uniform prior.
double extracted_bits(const ConfusionMatrix& c);

struct SweepPoint {
    double exposure = 0.0;
    double condition_number = 1.0;
};

// cond(C) as every exposure (all kappa_t[k] and kappa_t_reset together) is
// swept through the given values, with fixed per-bit readout error rates.
std::vector<SweepPoint> condition_sweep(const std::vector<double>& exposures,
                                        int bit_count = 4, double eps_g = 0.01,
                                        double eps_e = 0.03, int threads = 0);

}  // namespace pnr
