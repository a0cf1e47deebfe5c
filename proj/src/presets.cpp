#include "pnr/presets.hpp"

namespace pnr {
namespace presets {

DetectorParams fock_detector() {
    DetectorParams params;
    params.bit_count = 4;
    params.kappa_t = {0.0040, 0.0034, 0.0034, 0.0034};
    params.kappa_t_reset = 0.0046;
    params.eps_g = {0.019, 0.014, 0.011, 0.013};
    params.eps_e = {0.029, 0.026, 0.035, 0.033};
    return params;
}

DetectorParams coherent_detector() {
    DetectorParams params = fock_detector();
    params.kappa_t[0] = 0.0032;
    return params;
}

DetectorParams fock_detector_measurement_only() {
    DetectorParams params = fock_detector();
    // Measurement window alone: 2.9 us per bit at a 1 ms storage lifetime.
    params.kappa_t[0] = 0.0029;
    return params;
}

ResetModel default_reset() {
    ResetModel reset;
    reset.kind = ResetKind::constant_exposure;
    reset.mean_attempts = 2.05;
    reset.attempt_duration_exposure = 0.0046 / 2.05;
    return reset;
}

ResetModel empirical_reset() {
    ResetModel reset;
    reset.kind = ResetKind::empirical;
    reset.mean_attempts = 2.05;
    reset.attempt_duration_exposure = 0.0046 / 2.05;
    // pmf over 1..4 attempts with mean 2.05 and P(attempts > 1) = 0.351.
    reset.empirical_pmf = {0.649, 0.0, 0.003, 0.348};
    return reset;
}

}  // namespace presets
}  // namespace pnr
