#include <gtest/gtest.h>

#include "bkc/response.hpp"

using namespace bkc;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Susceptibility, SingleSiteNormalisation) {
    const double g = 0.8;
    auto s = ChainSpec::common_phase(1, 0, 0, 0, g);
    auto chi = susceptibility(s, 0.0);
    // signed convention (i w + M)^-1; the drive amplitude 2 f / gamma is its magnitude
    EXPECT_NEAR(chi.chi(0, 0).real(), -2.0 / g, 1e-15);
    EXPECT_NEAR(std::abs(chi.chi(1, 1)), 2.0 / g, 1e-15);
    EXPECT_EQ(chi.chi(0, 1), cd(0.0));
}

TEST(Susceptibility, InverseIdentity) {
    auto s = ChainSpec::common_phase(5, 0.3, 0.5, 1.1, 0.7, Boundary::periodic);
    s.detuning[2] = 0.2;
    const double w = 0.37;
    auto chi = susceptibility(s, w);
    CMat A = build_dynamical_matrix(s).cast<cd>();
    A.diagonal().array() += cd(0, w);
    EXPECT_LE((chi.chi * A - CMat::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Susceptibility, QuarterPhaseBlockDiagonal) {
    auto s = ChainSpec::common_phase(4, 0.3, 0.2, pi / 2, 1.0);
    auto chi = susceptibility(s, 0.2);
    const double nrm = num::inf_norm(chi.chi);
    EXPECT_LE(chi.chi.topRightCorner(4, 4).cwiseAbs().maxCoeff(), 1e-12 * nrm);
    EXPECT_LE(chi.chi.bottomLeftCorner(4, 4).cwiseAbs().maxCoeff(), 1e-12 * nrm);
}

TEST(Susceptibility, EndToEndAtOperatingPoint) {
    const double g = 2 * pi * 8e3;
    auto chi = susceptibility(ep_chain(4, 0.75, g), 0.0);
    EXPECT_NEAR(std::abs(chi.x_to_x(0, 3)) / (2.0 / g), 0.421875, 1e-12);
}

TEST(Susceptibility, SingularAtUndampedResonance) {
    ChainSpec s;
    s.n_sites = 1;
    s.damping = {0.0};
    s.detuning = {0.5};
    EXPECT_THROW(susceptibility(s, 0.5), singular_matrix_error);
}

TEST(Oracle, Examples) {
    CMat z = resonant_susceptibility_oracle(3, 0.0, 2.0);
    EXPECT_LE((z + CMat::Identity(6, 6)).cwiseAbs().maxCoeff(), 0.0);
    CMat two = resonant_susceptibility_oracle(2, 1.0, 1.0);
    CMat xb(2, 2);
    xb << 1, 0, 1, 1;
    EXPECT_LE((two.topLeftCorner(2, 2) - (-2.0) * xb).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(resonant_susceptibility_oracle(2, -1.0, 1.0), std::invalid_argument);
}

TEST(Oracle, GenericPathAgreesOverFamily) {
    for (int n = 1; n <= 8; ++n) {
        for (double G : {0.0, 0.5, 1.0, 1.37, 2.0, 3.0, 4.0}) {
            const double g = 1.3;
            CMat ref = resonant_susceptibility_oracle(n, G, g);
            CMat num = susceptibility(ep_chain(n, G, g), 0.0).chi;
            const double scale = ref.cwiseAbs().maxCoeff();
            EXPECT_LE((num - ref).cwiseAbs().maxCoeff(), 1e-10 * scale) << n << " " << G;
        }
    }
}

TEST(Oracle, DirectionalGainPerLink) {
    const double g = 1.0, G = 1.6;
    auto chi = susceptibility(ep_chain(5, G, g), 0.0);
    const double nrm = num::inf_norm(chi.chi);
    for (int j = 0; j + 1 < 5; ++j) {
        EXPECT_NEAR(std::abs(chi.x_to_x(j, j + 1)), G * 2 / g, 1e-12);
        EXPECT_NEAR(std::abs(chi.p_to_p(j + 1, j)), G * 2 / g, 1e-12);
        EXPECT_LE(std::abs(chi.x_to_x(j + 1, j)), 1e-12 * nrm);
    }
}

TEST(Oracle, ReflectionWithQuadratureSwap) {
    const int n = 4;
    auto chi = susceptibility(ep_chain(n, 1.3, 1.0), 0.0).chi;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            EXPECT_NEAR(std::abs(chi(b, a)), std::abs(chi(n + (n - 1 - b), n + (n - 1 - a))), 1e-10);
}

TEST(Oracle, PeriodicBlockFourierDiagonalisation) {
    const int n = 6;
    auto s = ChainSpec::common_phase(n, 0.3, 0.2, 0.8, 1.0, Boundary::periodic);
    auto chi = susceptibility(s, 0.0).chi;
    CMat T = mode_transform(n);
    CMat chia = T * chi * T.adjoint();  // (a, a^dag) basis
    for (int m = 0; m < n; ++m) {
        const double k = 2 * pi * m / n;
        CVec r1 = CVec::Zero(2 * n), r2 = CVec::Zero(2 * n);
        for (int j = 0; j < n; ++j) {
            r1(j) = std::exp(cd(0, k * j)) / std::sqrt(double(n));
            r2(n + j) = std::exp(cd(0, k * j)) / std::sqrt(double(n));
        }
        const CVec* r[2] = {&r1, &r2};
        CMat blk(2, 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) blk(a, b) = (r[a]->transpose() * chia * r[b]->conjugate())(0, 0);
        CMat ref = (cd(0, -1) * bloch_matrix(s, k)).inverse();
        EXPECT_LE((blk - ref).cwiseAbs().maxCoeff(), 1e-10) << k;
    }
}

TEST(Channels, UncoupledAllEqual) {
    auto g = channel_gains(susceptibility(ep_chain(4, 0.0, 2.0), 0.0).chi);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(g.sigma(i), 1.0, 1e-14);
}

TEST(Channels, PairedLeadingValuesAndSeparation) {
    double prev_s1 = 0, prev_ratio = 0;
    for (double G : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        auto g = channel_gains(susceptibility(ep_chain(4, G, 1.0), 0.0).chi);
        EXPECT_NEAR(g.sigma(0), g.sigma(1), 1e-9 * g.sigma(0));
        EXPECT_GT(g.sigma(0), prev_s1);
        EXPECT_GT(g.ratio_23, prev_ratio);
        prev_s1 = g.sigma(0);
        prev_ratio = g.ratio_23;
    }
}

TEST(GainMap, OperatingPointAndLimits) {
    const double g = 1.0, J = 5.0 / 16.0;
    auto base = ChainSpec::common_phase(4, J, 0, 0, g);
    auto map = end_to_end_gain_map(base, {0.0, pi / 2}, {0.0, 0.5, 1.0}, 2, 512);
    const auto& ep = map.points[1 * 3 + 2];
    ASSERT_TRUE(ep.gain.has_value());
    EXPECT_NEAR(*ep.gain, 2.0 / g * 1.953125, 1e-10);
    EXPECT_EQ(ep.label, Regime::nontrivial_winding);
    for (int i = 0; i < 2; ++i) {
        ASSERT_TRUE(map.points[i * 3].gain.has_value());
        EXPECT_LE(*map.points[i * 3].gain, 2.0 / g + 1e-12);
    }
    // phi = 0, |lambda| = |J|: neighbours only
    ASSERT_TRUE(map.points[2].gain.has_value());
    EXPECT_LE(*map.points[2].gain, 1e-12);
}

TEST(GainMap, UnstablePointsCarryLabelOnly) {
    auto base = ChainSpec::common_phase(4, 0.3125, 0, 0, 1.0);
    auto map = end_to_end_gain_map(base, {pi / 2}, {3.0}, 1, 256);
    EXPECT_FALSE(map.points[0].gain.has_value());
    EXPECT_EQ(map.points[0].label, Regime::obc_unstable);
}

TEST(GainMap, ParallelMatchesSerial) {
    auto base = ChainSpec::common_phase(4, 0.3125, 0, 0, 1.0);
    std::vector<double> ph, r;
    for (int i = 0; i < 7; ++i) ph.push_back(pi * i / 6);
    for (int i = 0; i < 7; ++i) r.push_back(2.0 * i / 6);
    auto a = end_to_end_gain_map(base, ph, r, 1, 256), b = end_to_end_gain_map(base, ph, r, 4, 256);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].gain, b.points[i].gain);
        EXPECT_EQ(a.points[i].label, b.points[i].label);
    }
}

TEST(Nonreciprocity, OpenAndPeriodic) {
    for (auto bc : {Boundary::open, Boundary::periodic}) {
        auto s = ChainSpec::common_phase(4, 0.2, 0.2, 0.0, 1.0, bc);
        auto r = nonreciprocity_report(s);
        EXPECT_TRUE(r.p_to_x_forbidden);
        EXPECT_TRUE(r.neighbor_confined);
        EXPECT_GT(r.min_neighbor_x_to_p, 0.1 * r.chi_norm);
        EXPECT_LE(r.boundary_mismatch, 1e-12 * r.chi_norm);
        auto chi = susceptibility(s, 0.0);
        EXPECT_GT(std::abs(chi.x_to_p(1, 0)), 0.0);
        EXPECT_GT(std::abs(chi.x_to_p(1, 2)), 0.0);
    }
}

TEST(Nonreciprocity, TrivialAndPreconditions) {
    auto r = nonreciprocity_report(ChainSpec::common_phase(4, 0, 0, 0, 1.0));
    EXPECT_EQ(r.max_p_to_x, 0.0);
    EXPECT_EQ(r.max_distant_x_to_p, 0.0);
    EXPECT_EQ(r.min_neighbor_x_to_p, 0.0);
    EXPECT_THROW(nonreciprocity_report(ChainSpec::common_phase(4, 0.2, 0.3, 0.0, 1.0)), std::invalid_argument);
    EXPECT_THROW(nonreciprocity_report(ChainSpec::common_phase(4, 0.2, 0.2, 0.5, 1.0)), std::invalid_argument);
}
