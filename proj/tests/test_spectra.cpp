#include <gtest/gtest.h>

#include <random>

#include "bkc/spectra.hpp"

using namespace bkc;

namespace {

constexpr double pi = std::numbers::pi;

double bloch_norm(const ChainSpec& s, double k) { return num::inf_norm(bloch_matrix(s, k)); }

} // namespace

TEST(BlochBands, QuarterPhaseMatchesClosedForm) {
    const double mu = 0.4, g = 0.5;
    auto s = ep_chain(4, 4 * mu / g, g, Boundary::periodic);
    auto b = bloch_bands(s, 256);
    for (std::size_t i = 0; i < b.k.size(); ++i) {
        const double k = b.k[i];
        const cd wp = cd(0, -g / 2) - 2 * mu * std::sin(k) - cd(0, 2 * mu) * std::cos(k);
        const cd wm = cd(0, -g / 2) - 2 * mu * std::sin(k) + cd(0, 2 * mu) * std::cos(k);
        EXPECT_LE(std::abs(b.plus[i] - wp), 1e-12);
        EXPECT_LE(std::abs(b.minus[i] - wm), 1e-12);
        // the same curves written with a quarter-period shift of k
        const double kk = k + pi / 2;
        const cd wx = cd(0, -g / 2) - cd(0, 2 * mu) * std::sin(kk) + 2 * mu * std::cos(kk);
        EXPECT_LE(std::abs(b.plus[i] - wx), 1e-12);
    }
}

TEST(BlochBands, UncoupledBandsAreFlat) {
    ChainSpec s = ChainSpec::common_phase(3, 0, 0, 0, 0.6, Boundary::periodic);
    auto b = bloch_bands(s, 64);
    for (std::size_t i = 0; i < b.k.size(); ++i) {
        EXPECT_EQ(b.plus[i], cd(0, -0.3));
        EXPECT_EQ(b.minus[i], cd(0, -0.3));
    }
}

TEST(BlochBands, MatchRealSpacePeriodicChain) {
    const int n = 12;
    auto s = ChainSpec::common_phase(n, 0.5, 1.0, 0.3, 0.4, Boundary::periodic);
    CVec ev = num::eigenvalues(build_dynamical_matrix(s));
    std::vector<cd> real_space;
    for (int i = 0; i < ev.size(); ++i) real_space.push_back(frequency_from_rate(ev(i)));
    auto b = bloch_bands(s, 12 * 16);
    for (int m = 0; m < n; ++m) {
        for (cd w : {b.plus[m * 16], b.minus[m * 16]}) {
            double best = 1e9;
            for (cd r : real_space) best = std::min(best, std::abs(r - w));
            EXPECT_LE(best, 1e-8);
        }
    }
}

TEST(BlochBands, BandsAreClosedCurvesAndTrackedContinuously) {
    auto s = ChainSpec::common_phase(4, 0.7, 1.1, 1.0, 0.2, Boundary::periodic);
    auto b = bloch_bands(s, 512);
    auto cf0 = closed_form_bands(s, 0.0);
    EXPECT_LE(std::abs(b.plus[0] - cf0.first), 1e-12);
    for (std::size_t i = 0; i < b.k.size(); ++i) {
        auto cf = closed_form_bands(s, b.k[i]);
        EXPECT_LE(std::abs(b.plus[i] - cf.first), 1e-10);
        EXPECT_LE(std::abs(b.minus[i] - cf.second), 1e-10);
    }
    EXPECT_LE(std::abs(b.plus.back() - b.plus.front()), 0.05);
}

TEST(BlochBands, Preconditions) {
    auto s = ChainSpec::common_phase(4, 1.0, 1.0, 0.3, 0.2, Boundary::periodic);
    EXPECT_THROW(bloch_bands(s, 32), std::invalid_argument);
    // |lambda| = |J cos phi|: both bands coincide everywhere
    auto edge = ChainSpec::common_phase(4, 1.0, std::cos(0.3), 0.3, 0.2, Boundary::periodic);
    auto b = bloch_bands(edge, 128);
    for (std::size_t i = 0; i < b.k.size(); ++i) EXPECT_LE(std::abs(b.plus[i] - b.minus[i]), 1e-6);
    s.detuning[1] = 0.1;
    EXPECT_THROW(bloch_bands(s, 128), std::invalid_argument);
}

TEST(Winding, QuarterPhaseRegimes) {
    const double g = 1.0;
    auto big = ChainSpec::common_phase(4, 0.5, 0.3, pi / 2, g, Boundary::periodic);  // 2|lambda| > gamma/2
    EXPECT_EQ(winding_numbers(big), std::make_pair(-1, 1));
    auto small = ChainSpec::common_phase(4, 0.5, 0.2, pi / 2, g, Boundary::periodic);
    EXPECT_EQ(winding_numbers(small), std::make_pair(0, 0));
    auto edge = ChainSpec::common_phase(4, 0.5, 0.25, pi / 2, g, Boundary::periodic);
    EXPECT_THROW(winding_numbers(edge), phase_boundary_error);
}

TEST(Winding, ClosedPointGapIsTrivial) {
    for (double g : {0.01, 0.3, 3.0}) {
        auto s = ChainSpec::common_phase(4, 2.0, 0.5, 0.4, g, Boundary::periodic);
        EXPECT_EQ(winding_numbers(s), std::make_pair(0, 0));
    }
}

TEST(Winding, OppositeSignsAndGeometricAgreement) {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(0.0, 2.0), ph(0.0, 2 * pi);
    int nontrivial = 0;
    for (int t = 0; t < 200; ++t) {
        auto s = ChainSpec::common_phase(4, u(gen), u(gen), ph(gen), 0.5, Boundary::periodic);
        std::pair<int, int> w, geo;
        try {
            geo = geometric_winding(s);
            w = winding_numbers(s, 1024);
        } catch (const phase_boundary_error&) {
            continue;
        }
        EXPECT_EQ(w.first + w.second, 0);
        EXPECT_EQ(w, geo);
        nontrivial += w.first != 0;
    }
    EXPECT_GT(nontrivial, 10);
}

TEST(Winding, ChangesOnlyWhenDampingCrossesTheBand) {
    // 2 sqrt(|lambda|^2 - |J|^2 cos^2 phi) = 2 * 0.6 = 1.2; threshold at gamma = 2.4
    auto make = [](double g) { return ChainSpec::common_phase(4, 1.0, 1.0, std::acos(0.8), g, Boundary::periodic); };
    for (double g : {0.1, 1.0, 2.3}) EXPECT_EQ(std::abs(winding_numbers(make(g)).first), 1);
    for (double g : {2.5, 4.0}) EXPECT_EQ(winding_numbers(make(g)).first, 0);
}

TEST(Stability, PeriodicGrowthCrossesZeroAtUnitGain) {
    auto rate = [](double G) { return stability_report(ep_chain(4, G, 1.0, Boundary::periodic)).growth_rate; };
    double lo = 0.5, hi = 1.5;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) < 0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(0.5 * (lo + hi), 1.0, 1e-6);
    // Bloch-band form: max_k Re(-i w(k)) = gamma (G - 1) / 2
    auto s = ep_chain(4, 1.3, 1.0, Boundary::periodic);
    auto b = bloch_bands(s, 4096);
    double best = -1e9;
    for (std::size_t i = 0; i < b.k.size(); ++i)
        best = std::max({best, rate_from_frequency(b.plus[i]).real(), rate_from_frequency(b.minus[i]).real()});
    EXPECT_NEAR(best, 0.5 * (1.3 - 1.0), 1e-12);
}

TEST(Stability, OpenExceptionalChainPinnedAtHalfDamping) {
    for (double G : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        auto r = obc_stability_report(ep_chain(4, G, 1.0));
        EXPECT_NEAR(r.growth_rate, -0.5, 1e-9);
        EXPECT_TRUE(r.stable);
    }
}

TEST(Stability, UncoupledGrowthIsSlowestDecay) {
    ChainSpec s;
    s.n_sites = 3;
    s.damping = {0.4, 0.2, 0.9};
    s.detuning = {0, 0, 0};
    EXPECT_NEAR(obc_stability_report(s).growth_rate, -0.1, 1e-15);
}

TEST(Stability, OpenOnsetMatchesConsistentClosedForm) {
    const int n = 4;
    for (double ratio : {0.2, 0.5, 1.0}) {  // gamma / (2 J)
        const double J = 1.0, g = 2.0 * J * ratio;
        auto s = ChainSpec::common_phase(n, J, 0.0, pi / 2, g);
        const double onset = instability_onset(s, J, 10 * J);
        EXPECT_NEAR(onset / obc_threshold(n, J, g), 1.0, 1e-9);
        // gamma/2 in place of gamma/4 does not describe this chain
        EXPECT_GT(std::abs(onset / obc_threshold_printed(n, J, g) - 1.0), 1e-3);
        auto below = s, above = s;
        below.squeezing = cd(0, 0.999 * onset);
        above.squeezing = cd(0, 1.001 * onset);
        EXPECT_LT(obc_stability_report(below).growth_rate, 0.0);
        EXPECT_GT(obc_stability_report(above).growth_rate, 0.0);
        EXPECT_TRUE(obc_stability_report(above).closed_form_agrees);
    }
    // gamma -> 0: onset at |lambda / J| = 1
    EXPECT_NEAR(obc_threshold(n, 1.0, 1e-9), 1.0, 1e-12);
}

TEST(Stability, OpenSpectrumIndependentOfPhaseUnderGaugeMap) {
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(0.1, 1.5), ph(0.05, pi - 0.05);
    for (int t = 0; t < 20; ++t) {
        const double J = u(gen), phi = ph(gen);
        const double L = std::abs(J * std::cos(phi)) + u(gen);
        auto s = ChainSpec::common_phase(5, J, L, phi, 0.3);
        auto m = ChainSpec::common_phase(5, J * std::sin(phi), std::sqrt(L * L - J * J * std::pow(std::cos(phi), 2)),
                                         pi / 2, 0.3);
        CVec a = num::eigenvalues(build_dynamical_matrix(s)), b = num::eigenvalues(build_dynamical_matrix(m));
        for (int i = 0; i < a.size(); ++i) {
            double best = 1e9;
            for (int j = 0; j < b.size(); ++j) best = std::min(best, std::abs(a(i) - b(j)));
            EXPECT_LE(best, 1e-8);
        }
    }
}

TEST(Parity, BlochResidualVanishesForBothGaps) {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(0.05, 2.0), ph(0.0, 2 * pi), kd(0.0, 2 * pi);
    int open = 0, closed = 0;
    for (int t = 0; t < 100; ++t) {
        auto s = ChainSpec::common_phase(4, u(gen), u(gen), ph(gen), 0.4, Boundary::periodic);
        const double k = kd(gen);
        auto lt = local_quadrature_transform(s);
        (lt.gap == GapKind::open ? open : closed)++;
        EXPECT_LE(parity_symmetry_residual(s, k), 1e-10 * bloch_norm(s, k + pi / 2));
    }
    EXPECT_GT(open, 10);
    EXPECT_GT(closed, 10);
    auto s = ChainSpec::common_phase(4, 0.8, 1.3, 0.9, 0.4, Boundary::periodic);
    EXPECT_LE(parity_symmetry_residual(s, 0.37), 1e-10 * bloch_norm(s, 0.37));
}

TEST(Parity, ColumnMatrixItselfIsNotTheIntertwiner) {
    auto s = ChainSpec::common_phase(4, 0.8, 1.3, 0.9, 0.4, Boundary::periodic);
    CMat V = local_quadrature_transform(s).V;
    const double k = 0.37;
    CMat R = bloch_matrix(s, k + pi / 2) * V - V * bloch_matrix(s, -k + pi / 2);
    EXPECT_GT(num::inf_norm(R), 1e-3 * bloch_norm(s, k));
}

TEST(Parity, UncoupledResidualExactlyZero) {
    auto s = ChainSpec::common_phase(4, 0.0, 0.0, 0.0, 0.4, Boundary::periodic);
    EXPECT_EQ(parity_symmetry_residual(s, 0.37), 0.0);
    EXPECT_EQ(real_space_parity_residual(s), 0.0);
}

TEST(Parity, RealSpaceResidualAndDetuningBreaking) {
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> u(0.05, 2.0), ph(0.0, 2 * pi);
    for (int t = 0; t < 30; ++t) {
        const int n = 4 + (t % 3);
        const Boundary b = (t % 2 == 0 || n % 2 == 1) ? Boundary::open : Boundary::periodic;
        const double g = 0.4;
        auto s = ChainSpec::common_phase(n, u(gen), u(gen), ph(gen), g, b);
        if (std::abs(std::abs(s.hopping / s.squeezing) * std::cos(s.phase()) - 1.0) < 1e-3) continue;
        const double Mn = num::inf_norm(build_dynamical_matrix(s));
        EXPECT_LE(real_space_parity_residual(s), 1e-10 * Mn);
        for (int j = 0; j < n; ++j) {
            auto d = s;
            d.detuning[j] = 0.3 * g;
            EXPECT_GT(real_space_parity_residual(d), 1e-3 * Mn) << "n=" << n << " site " << j;
        }
    }
}

TEST(Classify, Examples) {
    const double g = 1.0;
    auto ep = ep_chain(4, 1.5, g, Boundary::open);
    auto c = classify_phase(ep);
    EXPECT_EQ(c.label, Regime::nontrivial_winding);
    EXPECT_EQ(c.nu_plus, -1);
    EXPECT_EQ(c.nu_minus, 1);
    EXPECT_FALSE(stability_report(ep_chain(4, 1.5, g, Boundary::periodic)).stable);

    for (double G : {0.3, 1.0, 3.0}) {
        auto s = ChainSpec::common_phase(4, G / 4, G / 4, 0.0, g);
        auto cc = classify_phase(s);
        EXPECT_EQ(cc.label, Regime::point_gap_closed) << G;
    }
    auto trivial = ChainSpec::common_phase(4, 0.1, 0.1, pi / 2, g);  // 2|lambda| < gamma/2
    EXPECT_EQ(classify_phase(trivial).label, Regime::point_gap_open_trivial);

    auto unstable = ChainSpec::common_phase(4, 0.3, 1.0, pi / 2, g);
    auto cu = classify_phase(unstable);
    EXPECT_EQ(cu.label, Regime::obc_unstable);
    EXPECT_GT(cu.obc_value, 1.0);
    EXPECT_GT(cu.obc_growth_rate, 0.0);
}

TEST(Classify, LabelConsistentWithWinding) {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0), ph(0.0, pi);
    for (int t = 0; t < 100; ++t) {
        auto s = ChainSpec::common_phase(4, u(gen), u(gen), ph(gen), 0.6);
        try {
            auto c = classify_phase(s, 512);
            EXPECT_EQ(c.nu_plus, -c.nu_minus);
            if (c.label != Regime::obc_unstable) EXPECT_EQ(c.label == Regime::nontrivial_winding, c.nu_plus != 0);
        } catch (const phase_boundary_error&) {
        }
    }
}
