#pragma once

// Serial reference implementations used by the tests and the benchmark.
// These deliberately avoid the optimized code paths: the confusion matrix is
// built by literal enumeration of every hidden decay path, the Kronecker
// operators are materialized densely, and the simplex projection solves the
// constrained least-squares problem by exhaustive support enumeration.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pnr/multimode.hpp"
#include "pnr/params.hpp"
#include "pnr/simulate.hpp"

namespace pnr {
namespace reference {

// Sum over all n_max^B hidden transition paths per (outcome, input) pair.
// Exponential cost; intended for B <= 3 oracle checks.
Eigen::MatrixXd confusion_matrix_pathsum(const DetectorParams& params);

// Plain sequential ensemble loop sharing the per-shot stream derivation.
EnsembleResult simulate_ensemble_serial(const DetectorParams& params, const ResetModel& reset,
                                        const ProbVector& p_initial, long long shots,
                                        std::uint64_t seed, bool keep_shots = false);

// Densely materialized Kronecker product of the per-mode matrices.
Eigen::MatrixXd dense_kronecker(const std::vector<Eigen::MatrixXd>& factors);

// Projection onto the probability simplex by trying every support set.
Eigen::VectorXd project_to_simplex_enumerated(const Eigen::VectorXd& v);

}  // namespace reference
}  // namespace pnr
