#include <gtest/gtest.h>

#include "bkc/sensing.hpp"
#include "bkc/spectra.hpp"

using namespace bkc;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(SensingSusceptibility, VanishesWithoutDetuning) {
    auto pt = sensing_susceptibility(ep_chain(4, 1.37, 1.0), 0.0);
    EXPECT_EQ(pt.direct, cd(0.0));
    EXPECT_EQ(pt.rank_one, cd(0.0));
}

TEST(SensingSusceptibility, RankOneMatchesDirectOnFamily) {
    const double g = 1.0;
    for (int n = 1; n <= 5; ++n) {
        auto s = ep_chain(n, 1.37, g);
        for (int i = -10; i <= 10; ++i) {
            const double eps = 0.05 * i * g;
            auto pt = sensing_susceptibility(s, eps);
            const double scale = std::max(std::abs(pt.direct), 1e-300);
            EXPECT_LE(std::abs(pt.direct - pt.rank_one), 1e-9 * scale) << n << " " << eps;
        }
    }
}

TEST(SensingSusceptibility, AntisymmetryAndQuadratureReversal) {
    auto s = ep_chain(4, 1.37, 1.0);
    for (double eps : {0.01, 0.2, 0.45}) {
        auto a = sensing_susceptibility(s, eps), b = sensing_susceptibility(s, -eps);
        EXPECT_NEAR(std::abs(a.direct + b.direct), 0.0, 1e-12 * std::abs(a.direct));
        // the reverse quadrature channel carries no signal at the exceptional point
        EXPECT_LE(std::abs(a.full.p_to_x(0, 0)), 1e-12 * std::abs(a.direct));
    }
}

TEST(SensingSusceptibility, ExactAwayFromExceptionalPoint) {
    // |lambda| = 0.8 |J| at phi = pi/2: quadrature blocks still decouple, update stays exact
    for (int n = 2; n <= 8; ++n) {
        auto s = ChainSpec::common_phase(n, 0.3, 0.24, pi / 2, 1.0);
        auto pt = sensing_susceptibility(s, 0.2);
        EXPECT_LE(std::abs(pt.direct - pt.rank_one), 1e-12 * std::abs(pt.direct)) << n;
    }
}

TEST(SensingSusceptibility, RejectsOtherPhasesAndBoundaries) {
    EXPECT_THROW(sensing_susceptibility(ChainSpec::common_phase(3, 0.3, 0.3, 0.4, 1.0), 0.1), std::invalid_argument);
    EXPECT_THROW(sensing_susceptibility(ep_chain(3, 1.0, 1.0, Boundary::periodic), 0.1), std::invalid_argument);
}

TEST(Responsivity, SingleSite) {
    const double g = 0.7;
    EXPECT_NEAR(responsivity(ep_chain(1, 0.0, g)) * g / 4.0, 1.0, 1e-6);
}

TEST(Responsivity, OperatingPointClosedForms) {
    const double g = 2.0;
    auto s = ep_chain(4, 1.37, g);
    const double R = responsivity(s);
    EXPECT_NEAR(R / responsivity_ep(4, 1.37, g), 1.0, 1e-6);
    EXPECT_NEAR(R / responsivity_closed_form(s), 1.0, 1e-6);
    EXPECT_NEAR(R * g, 26.447425002436, 1e-5);
}

TEST(Responsivity, AttenuatedBelowUnitGain) {
    for (int n = 1; n <= 5; ++n) {
        const double r0 = responsivity(ep_chain(n, 0.5, 1.0)), r1 = responsivity(ep_chain(n + 1, 0.5, 1.0));
        EXPECT_NEAR(r1 / r0, 0.25, 1e-6);
    }
}

TEST(Scaling, LogSlopes) {
    EXPECT_NEAR(scaling_sweep(ep_chain(1, 1.37, 1.0), 1, 5).log_slope, 2 * std::log(1.37), 1e-3);
    EXPECT_NEAR(scaling_sweep(ep_chain(1, 1.0, 1.0), 1, 5).log_slope, 0.0, 1e-3);
    EXPECT_NEAR(scaling_sweep(ep_chain(1, 0.5, 1.0), 1, 5).log_slope, -1.3862943611, 1e-3);
}

TEST(Scaling, GrowthTracksWinding) {
    const double g = 1.0, J = 0.3;
    for (double L : {0.05, 0.1, 0.15, 0.2, 0.3, 0.33, 0.36}) {
        auto s = ChainSpec::common_phase(6, J, L, pi / 2, g);
        auto per = s;
        per.boundary = Boundary::periodic;
        const bool nontrivial = winding_numbers(per).first != 0;
        const double slope = scaling_sweep(s, 6, 10).log_slope;
        EXPECT_EQ(nontrivial, slope > 0) << "lambda=" << L << " slope=" << slope;
    }
}
