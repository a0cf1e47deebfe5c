#include "pnr/hmm.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pnr {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Pascal triangle in doubles; exact for the dimensions validate() allows.
std::vector<std::vector<double>> binomial_table(int n_max) {
    std::vector<std::vector<double>> c(n_max);
    for (int i = 0; i < n_max; ++i) {
        c[i].assign(static_cast<std::size_t>(i) + 1, 1.0);
        for (int j = 1; j < i; ++j)
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return c;
}

}  // namespace

TransitionMatrix transition_matrix(double kappa_t, int n_max) {
    if (!(kappa_t >= 0.0))
        throw DomainError("transition_matrix: exposure must be >= 0");
    if (n_max < 1)
        throw DomainError("transition_matrix: n_max must be >= 1");

    const double survive = std::exp(-kappa_t);
    const double decay = -std::expm1(-kappa_t);  // 1 - e^{-kt}, stable for small kt

    std::vector<double> survive_pow(n_max), decay_pow(n_max);
    survive_pow[0] = decay_pow[0] = 1.0;
    for (int k = 1; k < n_max; ++k) {
        survive_pow[k] = survive_pow[k - 1] * survive;
        decay_pow[k] = decay_pow[k - 1] * decay;
    }
    const auto binom = binomial_table(n_max);

    TransitionMatrix out;
    out.exposure = kappa_t;
    out.t = Eigen::MatrixXd::Zero(n_max, n_max);
    for (int i = 0; i < n_max; ++i)
        for (int j = 0; j <= i; ++j)
            out.t(i, j) = binom[i][j] * survive_pow[j] * decay_pow[i - j];
    return out;
}

EmissionPovm emission_povm(int bit, double eps_g, double eps_e, int n_max) {
    if (bit < 0)
        throw DomainError("emission_povm: bit index must be >= 0");
    if (!(eps_g >= 0.0 && eps_g < 1.0) || !(eps_e >= 0.0 && eps_e < 1.0))
        throw DomainError("emission_povm: rates must be in [0, 1)");
    if (n_max < 1)
        throw DomainError("emission_povm: n_max must be >= 1");

    EmissionPovm out;
    out.bit = bit;
    out.e0.resize(n_max);
    out.e1.resize(n_max);
    for (int i = 0; i < n_max; ++i) {
        if (((i >> bit) & 1) == 0) {
            out.e0[i] = 1.0 - eps_g;
            out.e1[i] = eps_g;
        } else {
            out.e0[i] = eps_e;
            out.e1[i] = 1.0 - eps_e;
        }
    }
    return out;
}

ConfusionMatrix confusion_matrix(const DetectorParams& params, int n_max, int threads) {
    validate(params);
    if (!is_power_of_two(n_max))
        throw DomainError("confusion_matrix: dimension must be a power of two");
    if (n_max != params.n_max())
        throw DomainError("confusion_matrix: dimension does not match 2^B");

    const int B = params.bit_count;
    std::vector<EmissionPovm> emission(B);
    std::vector<Eigen::MatrixXd> t_plain(B), t_after_reset(B);
    for (int k = 0; k < B; ++k) {
        emission[k] = emission_povm(k, params.eps_g[k], params.eps_e[k], n_max);
        t_plain[k] = transition_matrix(params.kappa_t[k], n_max).t;
        if (k > 0)
            t_after_reset[k] =
                transition_matrix(params.kappa_t[k] + params.kappa_t_reset, n_max).t;
    }

    ConfusionMatrix out;
    out.params_hash = params_hash(params);
    out.c.resize(n_max, n_max);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
    for (int outcome = 0; outcome < n_max; ++outcome) {
        // Contract the chain right to left for this outcome bitstring; the
        // result vector holds P(outcome | input j) for every j at once.
        Eigen::VectorXd u = emission[B - 1].row((outcome >> (B - 1)) & 1);
        for (int k = B - 1; k >= 1; --k) {
            const int prev_bit = (outcome >> (k - 1)) & 1;
            u = (prev_bit ? t_after_reset[k] : t_plain[k]) * u;
            u = emission[k - 1].row(prev_bit).cwiseProduct(u);
        }
        out.c.row(outcome) = (t_plain[0] * u).transpose();
    }
    return out;
}

ConfusionMatrix confusion_matrix(const DetectorParams& params) {
    return confusion_matrix(params, params.n_max());
}

ProbVector apply_confusion(const ConfusionMatrix& c, const ProbVector& p_ideal) {
    if (c.c.cols() != p_ideal.p.size())
        throw DomainError("apply_confusion: dimension mismatch");
    return ProbVector(c.c * p_ideal.p, Label::measured);
}

}  // namespace pnr
