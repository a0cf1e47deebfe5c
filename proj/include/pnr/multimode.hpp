#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pnr/errors.hpp"

namespace pnr {

// Joint photon-number configuration (n_1, ..., n_M); mode 1 is the most
// significant digit of the flattened index, matching the Kronecker order
// C_1 (x) C_2 (x) ... (x) C_M.
struct MultiIndex {
    std::vector<int> digits;

    int modes() const { return static_cast<int>(digits.size()); }
    bool operator==(const MultiIndex& other) const { return digits == other.digits; }
};

std::uint64_t flat_index(const MultiIndex& idx, int n_max);
MultiIndex multi_index_from_flat(std::uint64_t flat, int modes, int n_max);

// Sparse joint distribution keyed by digit tuple. std::map keeps iteration
// deterministic.
struct SparseDist {
    std::map<std::vector<int>, double> entries;
    long long shots = 0;
};

void validate(const SparseDist& dist, int modes, int n_max);

// One entry of the Kronecker product of the per-mode inverses, evaluated as
// an O(M) product without materializing the joint operator.
double kron_element(const std::vector<Eigen::MatrixXd>& mode_inverses,
                    const MultiIndex& i, const MultiIndex& j);

// Mitigated population of one target configuration: sum over the measured
// support of kron_element(target, j) * p_meas[j]. O(M * |support|).
double mitigate_element(const std::vector<Eigen::MatrixXd>& mode_inverses,
                        const MultiIndex& target, const SparseDist& p_meas);

// Order-q truncated expansion of the joint inverse. eps_m[m] is the
// off-diagonal magnitude ||C_m^{-1} - I||_max of each factor.
struct ExpansionSpec {
    int order_q = 0;
    std::vector<Eigen::MatrixXd> mode_inverses;
    std::vector<double> eps_m;
    std::uint64_t entry_budget = 50'000'000;

    int modes() const { return static_cast<int>(mode_inverses.size()); }
    int n_max() const {
        return mode_inverses.empty() ? 0 : static_cast<int>(mode_inverses.front().rows());
    }
};

ExpansionSpec make_expansion(std::vector<Eigen::MatrixXd> mode_inverses, int order_q,
                             std::uint64_t entry_budget = 50'000'000);

double mitigate_element(const ExpansionSpec& spec, const MultiIndex& target,
                        const SparseDist& p_meas);

// All entries of column j of the joint inverse whose multi-index differs from
// j in at most order_q mode positions. Diagonal factors keep their exact
// values; truncation only drops terms. Exact zeros are omitted.
// Throws ExpansionTooLarge when the predicted entry count exceeds the budget.
std::vector<std::pair<MultiIndex, double>> truncated_column(const ExpansionSpec& spec,
                                                            const MultiIndex& j);

// Upper bound on nonzero entries per truncated column:
// sum_{l=0..q} (n_max - 1)^l * binom(modes, l). Saturates at UINT64_MAX.
std::uint64_t entry_count(int order_q, int modes, int n_max);

// Applies the order-q truncated inverse to the whole measured support,
// accumulating mitigated entries over the union of column supports. Entries
// may be negative; no simplex projection is applied in the sparse setting.
SparseDist mitigate_truncated(const ExpansionSpec& spec, const SparseDist& p_meas,
                              int threads = 0);

}  // namespace pnr
