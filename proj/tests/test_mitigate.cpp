#include <cmath>
#include <random>

#include <doctest.h>

#include "pnr/mitigate.hpp"
#include "pnr/presets.hpp"
#include "pnr_reference.hpp"

using namespace pnr;

namespace {

ConfusionMatrix identity_confusion(int n) {
    ConfusionMatrix c;
    c.c = Eigen::MatrixXd::Identity(n, n);
    c.params_hash = "identity";
    return c;
}

ProbVector one_hot(int n, int size) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(size);
    p[n] = 1.0;
    return ProbVector(p, Label::measured);
}

}  // namespace

TEST_SUITE_BEGIN("mitigate");

TEST_CASE("identity inversion") {
    const auto report = invert_confusion(identity_confusion(16));
    CHECK(report.condition_number == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.residual_max < 1e-14);
    CHECK((report.inverse - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("calibrated detector inverts cleanly") {
    const auto c = confusion_matrix(presets::fock_detector());
    const auto report = invert_confusion(c);
    CHECK(report.condition_number > 1.0);
    CHECK(report.condition_number < 10.0);
    CHECK(report.residual_max < 1e-8);
}

TEST_CASE("ill-conditioned guard trips") {
    DetectorParams p;
    p.bit_count = 4;
    p.kappa_t = {0.5, 0.5, 0.5, 0.5};
    p.kappa_t_reset = 0.5;
    p.eps_g = {0.01, 0.01, 0.01, 0.01};
    p.eps_e = {0.03, 0.03, 0.03, 0.03};
    CHECK_THROWS_AS(invert_confusion(confusion_matrix(p)), IllConditioned);
}

TEST_CASE("condition number rises steeply with exposure") {
    const auto series = condition_sweep({0.05, 0.5});
    CHECK(series[1].condition_number >= 10.0 * series[0].condition_number);
}

TEST_CASE("simplex projection") {
    SUBCASE("known example") {
        Eigen::VectorXd raw(3);
        raw << 0.6, 0.6, -0.2;
        const Eigen::VectorXd projected = project_to_simplex(raw);
        CHECK(projected[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(projected[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(projected[2] == 0.0);
    }
    SUBCASE("already on the simplex") {
        Eigen::VectorXd p(4);
        p << 0.1, 0.2, 0.3, 0.4;
        CHECK((project_to_simplex(p) - p).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("matches exhaustive constrained least squares on random 4-vectors") {
        std::mt19937_64 gen(3);
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::VectorXd v(4);
            for (int k = 0; k < 4; ++k)
                v[k] = -1.0 + 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
            const Eigen::VectorXd fast = project_to_simplex(v);
            const Eigen::VectorXd brute = reference::project_to_simplex_enumerated(v);
            CHECK((fast - brute).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(fast.sum() - 1.0) < 1e-12);
            CHECK(fast.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("mitigation closes the loop on one-hot inputs") {
    const auto c = confusion_matrix(presets::fock_detector());
    const auto inv = invert_confusion(c);
    for (int j = 0; j < 16; ++j) {
        const auto measured = apply_confusion(c, ProbVector(one_hot(j, 16).p, Label::ideal));
        const auto result = mitigate(inv, measured);
        CHECK((result.mitigated.p - one_hot(j, 16).p).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(result.mitigated.label == Label::mitigated);
        CHECK_FALSE(result.mitigated.unprojected);
        CHECK(result.raw.unprojected);
    }
}

TEST_CASE("identity detector leaves the distribution unchanged") {
    const auto inv = invert_confusion(identity_confusion(16));
    Eigen::VectorXd p = Eigen::VectorXd::Constant(16, 1.0 / 16.0);
    const auto result = mitigate(inv, ProbVector(p, Label::measured));
    CHECK((result.mitigated.p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(result.residual_norm < 1e-12);
}

TEST_CASE("extracted information") {
    SUBCASE("identity extracts all bits") {
        CHECK(extracted_bits(identity_confusion(16)) == 4.0);
    }
    SUBCASE("uniform confusion extracts nothing") {
        ConfusionMatrix uniform;
        uniform.c = Eigen::MatrixXd::Constant(16, 16, 1.0 / 16.0);
        CHECK(extracted_bits(uniform) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("calibrated detector") {
        const auto c = confusion_matrix(presets::fock_detector());
        CHECK(extracted_bits(c) == doctest::Approx(3.1418667098816146).epsilon(1e-9));
    }
    SUBCASE("monotone nonincreasing in each error rate") {
        for (int which = 0; which < 3; ++which) {
            double previous = 5.0;
            for (double rate : {0.0, 0.02, 0.05, 0.1}) {
                DetectorParams p;
                p.bit_count = 4;
                p.kappa_t = {0, 0, 0, 0};
                p.kappa_t_reset = 0;
                p.eps_g = {0, 0, 0, 0};
                p.eps_e = {0, 0, 0, 0};
                if (which == 0)
                    p.eps_g = {rate, rate, rate, rate};
                else if (which == 1)
                    p.eps_e = {rate, rate, rate, rate};
                else
                    p.kappa_t = {rate, rate, rate, rate};
                const double bits = extracted_bits(confusion_matrix(p));
                CHECK(bits <= previous + 1e-12);
                previous = bits;
            }
        }
    }
}

TEST_CASE("condition sweep") {
    SUBCASE("error-free point has condition number one") {
        const auto series = condition_sweep({0.0}, 4, 0.0, 0.0);
        CHECK(series[0].condition_number == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("strictly increasing over the full range") {
        std::vector<double> exposures;
        for (double x = 0.001; x <= 0.6; x *= 1.9) exposures.push_back(x);
        const auto series = condition_sweep(exposures);
        for (std::size_t k = 1; k < series.size(); ++k)
            CHECK(series[k].condition_number > series[k - 1].condition_number);
    }
    SUBCASE("typical operating point is comfortably invertible") {
        const auto series = condition_sweep({0.0034});
        CHECK(series[0].condition_number < 10.0);
    }
    SUBCASE("unsorted input rejected") {
        CHECK_THROWS_AS(condition_sweep({0.5, 0.1}), DomainError);
    }
}

TEST_CASE("dimension guards") {
    const auto inv = invert_confusion(identity_confusion(16));
    Eigen::VectorXd p = Eigen::VectorXd::Constant(4, 0.25);
    CHECK_THROWS_AS(mitigate(inv, ProbVector(p, Label::measured)), DomainError);
}

TEST_SUITE_END();
