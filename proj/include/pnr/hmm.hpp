#pragma once

#include <string>

#include <Eigen/Core>

#include "pnr/fock.hpp"
#include "pnr/params.hpp"

namespace pnr {

// Pure-decay transition probabilities over a dimensionless exposure kappa*t.
// t(i, j) = P(i photons -> j photons); lower triangular, row-stochastic.
struct TransitionMatrix {
    Eigen::MatrixXd t;
    double exposure = 0.0;

    int n_max() const { return static_cast<int>(t.rows()); }
};

// Each photon independently survives the exposure with probability
// exp(-kappa_t), so row i is Binomial(i, exp(-kappa_t)) over survivors.
TransitionMatrix transition_matrix(double kappa_t, int n_max);

// Diagonal POVM of one bit measurement: e0[i] = P(read 0 | i photons),
// e1[i] = P(read 1 | i photons). e0[i] + e1[i] == 1 exactly.
struct EmissionPovm {
    Eigen::VectorXd e0;
    Eigen::VectorXd e1;
    int bit = 0;

    const Eigen::VectorXd& row(int outcome) const { return outcome ? e1 : e0; }
};

EmissionPovm emission_povm(int bit, double eps_g, double eps_e, int n_max);

// Column-stochastic detector response: c(i, j) = P(outcome i | input Fock j).
struct ConfusionMatrix {
    Eigen::MatrixXd c;
    std::string params_hash;

    int n_max() const { return static_cast<int>(c.rows()); }
};

// Assembles the confusion matrix by the forward algorithm: for each outcome
// bitstring, alternate transition matrix-vector products with elementwise
// emission weights, right to left. The transition before bit k has exposure
// kappa_t[k], plus kappa_t_reset when bit k-1 read 1. Equivalent to the
// explicit sum over all n_max^B hidden decay paths at O(B * n_max^2) per
// outcome. Rows are independent, so the build parallelizes over outcomes.
ConfusionMatrix confusion_matrix(const DetectorParams& params, int n_max, int threads = 0);
ConfusionMatrix confusion_matrix(const DetectorParams& params);

// Measured populations C * p_ideal.
ProbVector apply_confusion(const ConfusionMatrix& c, const ProbVector& p_ideal);

}  // namespace pnr
