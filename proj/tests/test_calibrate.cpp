#include <cmath>
#include <random>

#include <doctest.h>

#include "pnr/calibrate.hpp"
#include "pnr/presets.hpp"

using namespace pnr;

TEST_SUITE_BEGIN("calibrate");

TEST_CASE("identity basis with zero decay is the identity map") {
    DetectorParams truth = presets::fock_detector();
    const auto cal = synthesize_calibration(truth, 0, 0, 0, /*prep_exposure=*/0.0);
    const auto recovery = recover_emission(cal, 16);
    for (int j = 0; j < 16; ++j) {
        CHECK(recovery.e0[j] == doctest::Approx(cal.p_cal(0, j)).epsilon(1e-13));
        CHECK(recovery.e1[j] == doctest::Approx(cal.p_cal(1, j)).epsilon(1e-13));
    }
}

TEST_CASE("ideal data recovers the ideal POVM") {
    DetectorParams truth;
    truth.bit_count = 4;
    truth.kappa_t = {0, 0, 0, 0};
    truth.kappa_t_reset = 0;
    truth.eps_g = {0, 0, 0, 0};
    truth.eps_e = {0, 0, 0, 0};
    const auto cal = synthesize_calibration(truth, 1, 0, 0, 0.0);
    const auto recovery = recover_emission(cal, 16);
    const auto rates = extract_rates(recovery, 1);
    CHECK(rates.eps_g == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rates.eps_e == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rates.eps_g_err == 0.0);
}

TEST_CASE("noiseless round trip recovers planted rates to 1e-10") {
    std::mt19937_64 gen(5);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    };
    for (int trial = 0; trial < 5; ++trial) {
        DetectorParams truth;
        truth.bit_count = 4;
        truth.kappa_t = {0.0040, 0.0034, 0.0034, 0.0034};
        truth.kappa_t_reset = 0.0046;
        for (int k = 0; k < 4; ++k) {
            truth.eps_g.push_back(u(0.0, 0.05));
            truth.eps_e.push_back(u(0.0, 0.05));
        }
        for (int bit = 0; bit < 4; ++bit) {
            const auto cal = synthesize_calibration(truth, bit, 0, 0, truth.kappa_t[0]);
            const auto recovery = recover_emission(cal, 16);
            const auto rates = extract_rates(recovery, bit);
            CHECK(std::abs(rates.eps_g - truth.eps_g[static_cast<std::size_t>(bit)]) < 1e-10);
            CHECK(std::abs(rates.eps_e - truth.eps_e[static_cast<std::size_t>(bit)]) < 1e-10);
        }
    }
}

TEST_CASE("planted bit-0 rates recovered exactly from noiseless data") {
    DetectorParams truth = presets::fock_detector();
    truth.eps_g[0] = 0.019;
    truth.eps_e[0] = 0.029;
    const auto cal = synthesize_calibration(truth, 0, 0, 0, 0.0040);
    const auto rates = extract_rates(recover_emission(cal, 16), 0);
    CHECK(rates.eps_g == doctest::Approx(0.019).epsilon(1e-10));
    CHECK(rates.eps_e == doctest::Approx(0.029).epsilon(1e-10));
}

TEST_CASE("statistical round trip stays within three standard errors") {
    const DetectorParams truth = presets::fock_detector();
    int within = 0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
        const int bit = trial % 4;
        const auto cal = synthesize_calibration(truth, bit, 10000,
                                                1000 + static_cast<std::uint64_t>(trial),
                                                truth.kappa_t[0]);
        const auto rates = extract_rates(recover_emission(cal, 16), bit);
        const bool ok_g =
            std::abs(rates.eps_g - truth.eps_g[static_cast<std::size_t>(bit)]) <=
            3.0 * rates.eps_g_err;
        const bool ok_e =
            std::abs(rates.eps_e - truth.eps_e[static_cast<std::size_t>(bit)]) <=
            3.0 * rates.eps_e_err;
        within += (ok_g && ok_e) ? 1 : 0;
    }
    CHECK(within >= trials - 1);
}

TEST_CASE("coherent basis is rejected as ill-conditioned") {
    std::vector<double> alpha_sq(16);
    for (int j = 0; j < 16; ++j) {
        const double alpha = 3.0 * static_cast<double>(j) / 15.0;
        alpha_sq[static_cast<std::size_t>(j)] = alpha * alpha;
    }
    CalibrationSet cal;
    cal.basis_overlap = coherent_overlap_matrix(alpha_sq, 16);
    cal.prep_exposure = 0.0032;

    // Noiseless data through the same forward model.
    const DetectorParams truth = presets::coherent_detector();
    const Eigen::MatrixXd t = transition_matrix(cal.prep_exposure, 16).t;
    const EmissionPovm povm = emission_povm(0, truth.eps_g[0], truth.eps_e[0], 16);
    const Eigen::VectorXd p0 = cal.basis_overlap * (t * povm.e0);
    cal.p_cal.resize(2, 16);
    for (int j = 0; j < 16; ++j) {
        cal.p_cal(0, j) = p0[j];
        cal.p_cal(1, j) = 1.0 - p0[j];
    }

    CHECK_THROWS_AS(recover_emission(cal, 16), IllConditionedBasis);
    try {
        recover_emission(cal, 16);
    } catch (const IllConditionedBasis& e) {
        CHECK(e.condition_number > 1e6);
        CHECK(std::string(e.what()).find("cond") != std::string::npos);
    }
}

TEST_CASE("extract_rates rejects an empty parity class") {
    DetectorParams truth = presets::fock_detector();
    const auto cal = synthesize_calibration(truth, 0, 0, 0, 0.0);
    const auto recovery = recover_emission(cal, 16);
    CHECK_THROWS_AS(extract_rates(recovery, 4), DomainError);  // bit 4 never set below 16
}

TEST_SUITE_END();
