#include "pnr/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pnr {

namespace {

double condition_number_svd(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smallest = sv[sv.size() - 1];
    if (!(smallest > 0.0))
        return std::numeric_limits<double>::infinity();
    return sv[0] / smallest;
}

}  // namespace

InversionReport invert_confusion(const ConfusionMatrix& c, double cond_threshold) {
    const int n = c.n_max();
    if (n < 1 || c.c.rows() != c.c.cols())
        throw DomainError("invert_confusion: matrix must be square");

    InversionReport report;
    report.condition_number = condition_number_svd(c.c);
    if (!(report.condition_number <= cond_threshold)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "confusion matrix is ill-conditioned: cond = %.6g exceeds threshold %.6g",
                      report.condition_number, cond_threshold);
        throw IllConditioned(msg, report.condition_number, cond_threshold);
    }

    report.inverse = c.c.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    report.residual_max = (c.c * report.inverse - Eigen::MatrixXd::Identity(n, n))
                              .cwiseAbs()
                              .maxCoeff();
    return report;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    // Largest prefix whose shifted values stay positive fixes the threshold.
    double prefix = 0.0;
    double threshold = 0.0;
    int support = 0;
    for (int k = 0; k < n; ++k) {
        prefix += sorted[static_cast<std::size_t>(k)];
        const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
        if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) {
            threshold = candidate;
            support = k + 1;
        }
    }
    (void)support;

    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k)
        out[k] = std::max(v[k] - threshold, 0.0);
    return out;
}

MitigationResult mitigate(const Eigen::MatrixXd& c_inverse, const ProbVector& p_meas) {
    if (c_inverse.cols() != p_meas.p.size())
        throw DomainError("mitigate: dimension mismatch");

    MitigationResult result;
    Eigen::VectorXd raw = c_inverse * p_meas.p;
    Eigen::VectorXd projected = project_to_simplex(raw);
    result.residual_norm = (raw - projected).norm();
    result.raw = ProbVector(std::move(raw), Label::mitigated, /*unprojected=*/true);
    result.mitigated = ProbVector(std::move(projected), Label::mitigated);
    return result;
}

MitigationResult mitigate(const InversionReport& inv, const ProbVector& p_meas) {
    return mitigate(inv.inverse, p_meas);
}

double extracted_bits(const ConfusionMatrix& c) {
    const int n = c.n_max();
    int bits = 0;
    while ((1 << bits) < n) ++bits;
    if ((1 << bits) != n)
        throw DomainError("extracted_bits: dimension must be a power of two");

    const Eigen::VectorXd row_sums = c.c.rowwise().sum();
    double entropy = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(row_sums[i] > 0.0))
            continue;  // unreachable outcome contributes nothing
        for (int j = 0; j < n; ++j) {
            const double cij = c.c(i, j);
            if (cij > 0.0)
                entropy -= cij * std::log2(cij / row_sums[i]);
        }
    }
    return static_cast<double>(bits) - entropy / static_cast<double>(n);
}

std::vector<SweepPoint> condition_sweep(const std::vector<double>& exposures,
                                        int bit_count, double eps_g, double eps_e,
                                        int threads) {
    for (std::size_t k = 1; k < exposures.size(); ++k)
        if (exposures[k] < exposures[k - 1])
            throw DomainError("condition_sweep: exposures must be sorted ascending");

    std::vector<SweepPoint> series(exposures.size());
    const int count = static_cast<int>(exposures.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
    for (int k = 0; k < count; ++k) {
        DetectorParams params;
        params.bit_count = bit_count;
        params.kappa_t.assign(static_cast<std::size_t>(bit_count), exposures[static_cast<std::size_t>(k)]);
        params.kappa_t_reset = exposures[static_cast<std::size_t>(k)];
        params.eps_g.assign(static_cast<std::size_t>(bit_count), eps_g);
        params.eps_e.assign(static_cast<std::size_t>(bit_count), eps_e);
        // Serial build inside; the sweep itself is the parallel loop.
        const ConfusionMatrix c = confusion_matrix(params, params.n_max(), 1);
        series[static_cast<std::size_t>(k)] =
            SweepPoint{exposures[static_cast<std::size_t>(k)], condition_number_svd(c.c)};
    }
    return series;
}

}  // namespace pnr
