#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "pnr/errors.hpp"

namespace pnr {

enum class Label { measured, ideal, mitigated, calibration };

const char* to_string(Label label);
Label label_from_string(const std::string& name);

// Distribution over Fock outcomes. Entries are nonnegative and sum to 1,
// except for mitigated vectors before simplex projection, which may carry
// negative entries and are flagged `unprojected`.
struct ProbVector {
    Eigen::VectorXd p;
    Label label = Label::ideal;
    bool unprojected = false;

    ProbVector() = default;
    ProbVector(Eigen::VectorXd values, Label l, bool unproj = false)
        : p(std::move(values)), label(l), unprojected(unproj) {}

    int size() const { return static_cast<int>(p.size()); }
};

// Throws DomainError unless entries are valid for the vector's label and the
// sum is within `sum_tol` of 1.
void validate(const ProbVector& v, double sum_tol = 1e-9);

// Binary decomposition b_k(n) = floor(n / 2^k) mod 2, LSB first.
std::vector<int> bit_decompose(int n, int bit_count);
int bit_recompose(const std::vector<int>& bits);

// +1 when the k-th binary digit of n is 0, -1 when it is 1.
int generalized_parity(int k, int n);

struct CoherentDistribution {
    ProbVector dist;              // renormalized to sum 1
    double truncated_weight;      // Poisson mass above n_max, before renormalization
    bool truncation_warning;      // truncated_weight exceeded the threshold
};

// Poisson photon-number distribution of a coherent state with mean photon
// number alpha_sq, truncated to n < n_max and renormalized.
CoherentDistribution coherent_distribution(double alpha_sq, int n_max,
                                           double warn_threshold = 0.025);

// Total variation distance, (1/2) sum_k |a_k - b_k|.
double tvd(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double tvd(const ProbVector& a, const ProbVector& b);

}  // namespace pnr
