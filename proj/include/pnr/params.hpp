#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pnr/errors.hpp"

namespace pnr {

// Per-bit error rates and dimensionless decay exposures of the bitwise
// detector. kappa_t[k] is the storage-decay exposure accumulated while bit k
// is prepared and read out; kappa_t_reset is the extra exposure added to the
// transition preceding bit k whenever bit k-1 read 1 (ancilla reset).
// eps_g[k] = P(read 1 | ancilla should be g), eps_e[k] = P(read 0 | should be e).
struct DetectorParams {
    int bit_count = 0;
    std::vector<double> kappa_t;
    double kappa_t_reset = 0.0;
    std::vector<double> eps_g;
    std::vector<double> eps_e;

    int n_max() const { return 1 << bit_count; }
};

// Throws DomainError with a field-level message on any violation.
void validate(const DetectorParams& params);

// JSON schema: { "B": int, "kappa_t": [float], "kappa_t_reset": float,
//                "eps_g": [float], "eps_e": [float] }
DetectorParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const DetectorParams& params);
DetectorParams load_params(const std::string& path);
void save_params(const std::string& path, const DetectorParams& params);

// Stable fingerprint of the exact parameter values (FNV-1a over the raw
// double bits), rendered as 16 hex digits.
std::string params_hash(const DetectorParams& params);

}  // namespace pnr
