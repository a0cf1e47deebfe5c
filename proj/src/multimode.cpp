#include "pnr/multimode.hpp"

#include <cmath>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pnr {

std::uint64_t flat_index(const MultiIndex& idx, int n_max) {
    std::uint64_t flat = 0;
    for (int digit : idx.digits) {
        if (digit < 0 || digit >= n_max)
            throw DomainError("flat_index: digit outside [0, n_max)");
        flat = flat * static_cast<std::uint64_t>(n_max) + static_cast<std::uint64_t>(digit);
    }
    return flat;
}

MultiIndex multi_index_from_flat(std::uint64_t flat, int modes, int n_max) {
    MultiIndex idx;
    idx.digits.assign(static_cast<std::size_t>(modes), 0);
    for (int m = modes - 1; m >= 0; --m) {
        idx.digits[static_cast<std::size_t>(m)] =
            static_cast<int>(flat % static_cast<std::uint64_t>(n_max));
        flat /= static_cast<std::uint64_t>(n_max);
    }
    if (flat != 0)
        throw DomainError("multi_index_from_flat: flat index out of range");
    return idx;
}

void validate(const SparseDist& dist, int modes, int n_max) {
    double sum = 0.0;
    for (const auto& [digits, p] : dist.entries) {
        if (static_cast<int>(digits.size()) != modes)
            throw DomainError("SparseDist: entry has wrong mode count");
        for (int d : digits)
            if (d < 0 || d >= n_max)
                throw DomainError("SparseDist: digit outside [0, n_max)");
        if (p < 0.0)
            throw DomainError("SparseDist: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw DomainError("SparseDist: entries sum to " + std::to_string(sum));
    if (dist.shots > 0 &&
        static_cast<long long>(dist.entries.size()) > dist.shots)
        throw DomainError("SparseDist: more entries than shots");
}

double kron_element(const std::vector<Eigen::MatrixXd>& mode_inverses,
                    const MultiIndex& i, const MultiIndex& j) {
    const int modes = static_cast<int>(mode_inverses.size());
    if (i.modes() != modes || j.modes() != modes)
        throw DomainError("kron_element: digit arrays must have one digit per mode");
    double product = 1.0;
    for (int m = 0; m < modes; ++m)
        product *= mode_inverses[static_cast<std::size_t>(m)](
            i.digits[static_cast<std::size_t>(m)], j.digits[static_cast<std::size_t>(m)]);
    return product;
}

double mitigate_element(const std::vector<Eigen::MatrixXd>& mode_inverses,
                        const MultiIndex& target, const SparseDist& p_meas) {
    if (p_meas.entries.empty())
        throw DomainError("mitigate_element: empty measured distribution");
    double value = 0.0;
    MultiIndex j;
    for (const auto& [digits, p] : p_meas.entries) {
        j.digits = digits;
        value += kron_element(mode_inverses, target, j) * p;
    }
    return value;
}

ExpansionSpec make_expansion(std::vector<Eigen::MatrixXd> mode_inverses, int order_q,
                             std::uint64_t entry_budget) {
    ExpansionSpec spec;
    spec.order_q = order_q;
    spec.entry_budget = entry_budget;
    spec.eps_m.reserve(mode_inverses.size());
    for (const auto& inv : mode_inverses) {
        if (inv.rows() != inv.cols())
            throw DomainError("make_expansion: mode inverses must be square");
        if (!mode_inverses.empty() && inv.rows() != mode_inverses.front().rows())
            throw DomainError("make_expansion: mode inverses must share one dimension");
        const Eigen::MatrixXd off =
            inv - Eigen::MatrixXd::Identity(inv.rows(), inv.cols());
        spec.eps_m.push_back(off.cwiseAbs().maxCoeff());
    }
    spec.mode_inverses = std::move(mode_inverses);
    if (order_q < 0 || order_q > spec.modes())
        throw DomainError("make_expansion: order q must be in [0, M]");
    return spec;
}

double mitigate_element(const ExpansionSpec& spec, const MultiIndex& target,
                        const SparseDist& p_meas) {
    return mitigate_element(spec.mode_inverses, target, p_meas);
}

std::uint64_t entry_count(int order_q, int modes, int n_max) {
    if (order_q < 0 || order_q > modes)
        throw DomainError("entry_count: order q must be in [0, M]");
    const std::uint64_t kMax = UINT64_MAX;
    std::uint64_t total = 0;
    for (int level = 0; level <= order_q; ++level) {
        // binom(modes, level) * (n_max - 1)^level with saturation
        std::uint64_t term = 1;
        auto mul = [&](std::uint64_t factor) {
            if (factor != 0 && term > kMax / factor) term = kMax;
            else term *= factor;
        };
        for (int k = 0; k < level; ++k) {
            mul(static_cast<std::uint64_t>(modes - k));
            term /= static_cast<std::uint64_t>(k + 1);  // exact: C(m, k+1) stays integer
        }
        for (int k = 0; k < level; ++k)
            mul(static_cast<std::uint64_t>(n_max - 1));
        if (total > kMax - term) return kMax;
        total += term;
    }
    return total;
}

std::vector<std::pair<MultiIndex, double>> truncated_column(const ExpansionSpec& spec,
                                                            const MultiIndex& j) {
    const int modes = spec.modes();
    const int n_max = spec.n_max();
    if (j.modes() != modes)
        throw DomainError("truncated_column: column index has wrong mode count");
    const std::uint64_t predicted = entry_count(spec.order_q, modes, n_max);
    if (predicted > spec.entry_budget)
        throw ExpansionTooLarge("truncated_column: predicted " + std::to_string(predicted) +
                                    " entries exceed budget " +
                                    std::to_string(spec.entry_budget),
                                predicted, spec.entry_budget);

    std::vector<std::pair<MultiIndex, double>> column;
    column.reserve(static_cast<std::size_t>(
        predicted < (1u << 20) ? predicted : (1u << 20)));

    MultiIndex i = j;
    int off_diagonal = 0;

    auto emit = [&]() {
        const double value = kron_element(spec.mode_inverses, i, j);
        if (value != 0.0)
            column.emplace_back(i, value);
    };

    // Depth-first over mode subsets of size <= q (lexicographic), then over
    // the off-diagonal digits of each chosen mode; deterministic order.
    std::function<void(int)> descend = [&](int next_mode) {
        emit();
        if (off_diagonal == spec.order_q)
            return;
        for (int m = next_mode; m < modes; ++m) {
            ++off_diagonal;
            for (int digit = 0; digit < n_max; ++digit) {
                if (digit == j.digits[static_cast<std::size_t>(m)])
                    continue;
                i.digits[static_cast<std::size_t>(m)] = digit;
                descend(m + 1);
            }
            i.digits[static_cast<std::size_t>(m)] = j.digits[static_cast<std::size_t>(m)];
            --off_diagonal;
        }
    };

    descend(0);
    return column;
}

SparseDist mitigate_truncated(const ExpansionSpec& spec, const SparseDist& p_meas,
                              int threads) {
    if (p_meas.entries.empty())
        throw DomainError("mitigate_truncated: empty measured distribution");

    // Columns are computed in parallel, then merged in measured-entry order
    // so the accumulation is deterministic for any worker count.
    std::vector<std::pair<MultiIndex, double>> measured;
    measured.reserve(p_meas.entries.size());
    for (const auto& [digits, p] : p_meas.entries)
        measured.emplace_back(MultiIndex{digits}, p);

    const int count = static_cast<int>(measured.size());
    std::vector<std::vector<std::pair<MultiIndex, double>>> columns(
        static_cast<std::size_t>(count));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
    for (int k = 0; k < count; ++k)
        columns[static_cast<std::size_t>(k)] =
            truncated_column(spec, measured[static_cast<std::size_t>(k)].first);

    SparseDist out;
    out.shots = p_meas.shots;
    for (int k = 0; k < count; ++k) {
        const double weight = measured[static_cast<std::size_t>(k)].second;
        for (const auto& [idx, value] : columns[static_cast<std::size_t>(k)])
            out.entries[idx.digits] += value * weight;
    }
    return out;
}

}  // namespace pnr
