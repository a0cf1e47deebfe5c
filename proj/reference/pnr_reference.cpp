#include "pnr_reference.hpp"

#include <limits>

#include "pnr/hmm.hpp"
#include "pnr/rng.hpp"

namespace pnr {
namespace reference {

Eigen::MatrixXd confusion_matrix_pathsum(const DetectorParams& params) {
    validate(params);
    const int B = params.bit_count;
    const int n_max = params.n_max();
    double path_count = 1.0;
    for (int k = 0; k < B; ++k) path_count *= n_max;
    if (path_count > (1 << 24))
        throw DomainError("confusion_matrix_pathsum: too many hidden paths");

    std::vector<EmissionPovm> emission(B);
    std::vector<Eigen::MatrixXd> t_plain(B), t_after_reset(B);
    for (int k = 0; k < B; ++k) {
        emission[k] = emission_povm(k, params.eps_g[k], params.eps_e[k], n_max);
        t_plain[k] = transition_matrix(params.kappa_t[k], n_max).t;
        if (k > 0)
            t_after_reset[k] =
                transition_matrix(params.kappa_t[k] + params.kappa_t_reset, n_max).t;
    }

    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_max, n_max);
    std::vector<int> path(static_cast<std::size_t>(B), 0);
    for (int outcome = 0; outcome < n_max; ++outcome) {
        for (int input = 0; input < n_max; ++input) {
            double total = 0.0;
            std::fill(path.begin(), path.end(), 0);
            // Odometer over every hidden trajectory (s_1, ..., s_B).
            while (true) {
                double weight = 1.0;
                int prev_state = input;
                for (int k = 0; k < B; ++k) {
                    const int bit = (outcome >> k) & 1;
                    const int state = path[static_cast<std::size_t>(k)];
                    const Eigen::MatrixXd& t =
                        (k > 0 && ((outcome >> (k - 1)) & 1)) ? t_after_reset[k] : t_plain[k];
                    weight *= t(prev_state, state) * emission[k].row(bit)[state];
                    prev_state = state;
                }
                total += weight;

                int pos = B - 1;
                while (pos >= 0 && ++path[static_cast<std::size_t>(pos)] == n_max) {
                    path[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
            }
            c(outcome, input) = total;
        }
    }
    return c;
}

EnsembleResult simulate_ensemble_serial(const DetectorParams& params, const ResetModel& reset,
                                        const ProbVector& p_initial, long long shots,
                                        std::uint64_t seed, bool keep_shots) {
    validate(params);
    validate(reset);
    if (shots < 1)
        throw DomainError("simulate_ensemble_serial: shots must be >= 1");
    if (p_initial.p.size() != params.n_max())
        throw DomainError("simulate_ensemble_serial: initial distribution length must be 2^B");

    const int n_max = params.n_max();
    std::vector<double> cumulative(n_max);
    double acc = 0.0;
    for (int k = 0; k < n_max; ++k) {
        acc += p_initial.p[k];
        cumulative[k] = acc;
    }

    EnsembleResult result;
    result.shot_count = shots;
    if (keep_shots)
        result.shots.resize(static_cast<std::size_t>(shots));
    std::vector<long long> counts(n_max, 0);

    for (long long s = 0; s < shots; ++s) {
        RngStream rng = shot_stream(seed, static_cast<std::uint64_t>(s));
        const int initial = rng.categorical(cumulative);
        ShotRecord record = simulate_shot(params, reset, initial, rng);
        counts[record.outcome] += 1;
        if (keep_shots)
            result.shots[static_cast<std::size_t>(s)] = std::move(record);
    }

    Eigen::VectorXd hist(n_max);
    for (int k = 0; k < n_max; ++k)
        hist[k] = static_cast<double>(counts[k]) / static_cast<double>(shots);
    result.histogram = ProbVector(std::move(hist), Label::measured);
    return result;
}

Eigen::MatrixXd dense_kronecker(const std::vector<Eigen::MatrixXd>& factors) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Ones(1, 1);
    for (const auto& factor : factors) {
        Eigen::MatrixXd next(out.rows() * factor.rows(), out.cols() * factor.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                next.block(i * factor.rows(), j * factor.cols(), factor.rows(), factor.cols()) =
                    out(i, j) * factor;
        out = std::move(next);
    }
    return out;
}

Eigen::VectorXd project_to_simplex_enumerated(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    if (n < 1 || n > 20)
        throw DomainError("project_to_simplex_enumerated: size must be in [1, 20]");

    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
    double best_distance = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double sum = 0.0;
        int size = 0;
        for (int k = 0; k < n; ++k)
            if (mask & (1u << k)) {
                sum += v[k];
                ++size;
            }
        const double shift = (sum - 1.0) / static_cast<double>(size);
        Eigen::VectorXd candidate = Eigen::VectorXd::Zero(n);
        bool feasible = true;
        for (int k = 0; k < n; ++k) {
            if (!(mask & (1u << k))) continue;
            candidate[k] = v[k] - shift;
            if (candidate[k] < 0.0) feasible = false;
        }
        if (!feasible) continue;
        const double distance = (candidate - v).squaredNorm();
        if (distance < best_distance) {
            best_distance = distance;
            best = candidate;
        }
    }
    return best;
}

}  // namespace reference
}  // namespace pnr
