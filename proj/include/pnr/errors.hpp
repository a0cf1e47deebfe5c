#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pnr {

// Precondition / input violations (bad ranges, shape mismatches, schema errors).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Matrix inversion guard tripped: condition number above the configured threshold.
struct IllConditioned : std::runtime_error {
    double condition_number;
    double threshold;
    IllConditioned(const std::string& what, double cond, double thr)
        : std::runtime_error(what), condition_number(cond), threshold(thr) {}
};

// Calibration basis too close to linear dependence to invert reliably.
struct IllConditionedBasis : IllConditioned {
    using IllConditioned::IllConditioned;
};

// Predicted truncated-expansion size exceeds the configured memory budget.
struct ExpansionTooLarge : std::runtime_error {
    std::uint64_t predicted_entries;
    std::uint64_t budget;
    ExpansionTooLarge(const std::string& what, std::uint64_t predicted, std::uint64_t limit)
        : std::runtime_error(what), predicted_entries(predicted), budget(limit) {}
};

}  // namespace pnr
