#include "pnr/fock.hpp"

#include <cmath>

namespace pnr {

const char* to_string(Label label) {
    switch (label) {
        case Label::measured: return "measured";
        case Label::ideal: return "ideal";
        case Label::mitigated: return "mitigated";
        case Label::calibration: return "calibration";
    }
    return "ideal";
}

Label label_from_string(const std::string& name) {
    if (name == "measured") return Label::measured;
    if (name == "ideal") return Label::ideal;
    if (name == "mitigated") return Label::mitigated;
    if (name == "calibration") return Label::calibration;
    throw DomainError("unknown ProbVector label: " + name);
}

void validate(const ProbVector& v, double sum_tol) {
    if (v.p.size() == 0)
        throw DomainError("ProbVector: empty");
    const bool negatives_ok = v.label == Label::mitigated && v.unprojected;
    double sum = 0.0;
    for (int k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v.p[k]))
            throw DomainError("ProbVector: non-finite entry");
        if (v.p[k] < 0.0 && !negatives_ok)
            throw DomainError("ProbVector: negative entry in a " +
                              std::string(to_string(v.label)) + " vector");
        sum += v.p[k];
    }
    if (std::abs(sum - 1.0) > sum_tol)
        throw DomainError("ProbVector: entries sum to " + std::to_string(sum) +
                          ", expected 1");
}

std::vector<int> bit_decompose(int n, int bit_count) {
    if (bit_count < 1 || bit_count > 30)
        throw DomainError("bit_decompose: bit count must be in [1, 30]");
    if (n < 0 || n >= (1 << bit_count))
        throw DomainError("bit_decompose: n = " + std::to_string(n) +
                          " outside [0, 2^" + std::to_string(bit_count) + ")");
    std::vector<int> bits(bit_count);
    for (int k = 0; k < bit_count; ++k)
        bits[k] = (n >> k) & 1;
    return bits;
}

int bit_recompose(const std::vector<int>& bits) {
    int n = 0;
    for (std::size_t k = 0; k < bits.size(); ++k)
        n |= (bits[k] & 1) << k;
    return n;
}

int generalized_parity(int k, int n) {
    if (k < 0 || n < 0)
        throw DomainError("generalized_parity: negative argument");
    return 1 - 2 * ((n >> k) & 1);
}

CoherentDistribution coherent_distribution(double alpha_sq, int n_max,
                                           double warn_threshold) {
    if (alpha_sq < 0.0)
        throw DomainError("coherent_distribution: mean photon number must be >= 0");
    if (n_max < 1)
        throw DomainError("coherent_distribution: n_max must be >= 1");

    Eigen::VectorXd p(n_max);
    double term = std::exp(-alpha_sq);  // Poisson pmf at n = 0
    double kept = 0.0;
    for (int n = 0; n < n_max; ++n) {
        p[n] = term;
        kept += term;
        term *= alpha_sq / static_cast<double>(n + 1);
    }
    const double truncated = 1.0 - kept;
    p /= kept;

    CoherentDistribution out;
    out.dist = ProbVector(std::move(p), Label::ideal);
    out.truncated_weight = truncated;
    out.truncation_warning = truncated > warn_threshold;
    return out;
}

double tvd(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw DomainError("tvd: length mismatch");
    return 0.5 * (a - b).cwiseAbs().sum();
}

double tvd(const ProbVector& a, const ProbVector& b) { return tvd(a.p, b.p); }

}  // namespace pnr
