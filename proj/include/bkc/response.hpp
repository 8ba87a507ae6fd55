#pragma once

// Linear response: chi(w) = (i w 1 + M)^-1 in the (x, p) basis.
// chi(out, in) is the response of quadrature `out` to a drive on quadrature `in`,
// so "a -> b" is chi(b, a).

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "bkc/chain_model.hpp"
#include "bkc/numerics.hpp"
#include "bkc/parallel.hpp"
#include "bkc/spectra.hpp"

namespace bkc {

inline int x_index(int, int j) { return j; }
inline int p_index(int n, int j) { return n + j; }

struct SusceptibilityMatrix {
    double omega = 0.0;
    CMat chi;
    ChainSpec spec;

    int n() const { return spec.n_sites; }
    cd x_to_x(int from, int to) const { return chi(to, from); }
    cd x_to_p(int from, int to) const { return chi(n() + to, from); }
    cd p_to_x(int from, int to) const { return chi(to, n() + from); }
    cd p_to_p(int from, int to) const { return chi(n() + to, n() + from); }
};

inline SusceptibilityMatrix susceptibility(const ChainSpec& s, double omega = 0.0) {
    RMat M = build_dynamical_matrix(s);
    const Eigen::Index d = M.rows();
    CMat A = M.cast<cd>();
    A.diagonal().array() += cd(0.0, omega);
    SusceptibilityMatrix r;
    r.omega = omega;
    r.spec = s;
    try {
        r.chi = num::solve_linear(A, CMat::Identity(d, d));
    } catch (const singular_matrix_error& e) {
        throw singular_matrix_error(std::string("susceptibility: resonance singularity at probe frequency (") +
                                        e.what() + ")",
                                    e.condition);
    }
    return r;
}

// Closed form on the open EP family (J = lambda = i mu, G = 4 mu / gamma) at w = 0.
inline CMat resonant_susceptibility_oracle(int n, double G, double gamma) {
    if (n < 1) throw std::invalid_argument("oracle: n must be >= 1");
    if (!(gamma > 0) || !(G >= 0) || !std::isfinite(G)) throw std::invalid_argument("oracle: need gamma > 0, G >= 0");
    CMat chi = CMat::Zero(2 * n, 2 * n);
    const double pre = -2.0 / gamma;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) chi(i, j) = pre * std::pow(G, i - j);
        for (int j = i; j < n; ++j) chi(n + i, n + j) = pre * std::pow(-G, j - i);
    }
    return chi;
}

struct ChannelGains {
    RVec sigma;                 // descending
    double ratio_23 = 0.0;      // sigma_2 / sigma_3, two-channel separation
};

inline ChannelGains channel_gains(const CMat& chi) {
    ChannelGains g;
    g.sigma = num::svd(chi).sigma;
    g.ratio_23 = g.sigma.size() >= 3 && g.sigma(2) > 0 ? g.sigma(1) / g.sigma(2)
                                                       : std::numeric_limits<double>::quiet_NaN();
    return g;
}

struct GainMapPoint {
    double phase = 0.0;
    double ratio = 0.0;             // |lambda| / |J|
    std::optional<double> gain;     // |chi_{x1 -> xN}(0)|, empty when unstable
    std::optional<Regime> label;    // empty on a phase boundary
    double growth_rate = 0.0;
};

struct GainMap {
    std::vector<double> phases, ratios;
    std::vector<GainMapPoint> points;  // row-major, phase index outer
};

// Sweeps phase and |lambda|/|J| at fixed |J| and gamma from `base`.
inline GainMap end_to_end_gain_map(const ChainSpec& base, const std::vector<double>& phases,
                                   const std::vector<double>& ratios, unsigned threads = 1, int n_k = 1024) {
    base.validate();
    if (base.boundary != Boundary::open) throw std::invalid_argument("end_to_end_gain_map: requires open boundary");
    const double aJ = std::abs(base.hopping);
    const double gamma = base.gamma();
    GainMap map;
    map.phases = phases;
    map.ratios = ratios;
    map.points.resize(phases.size() * ratios.size());
    parallel_for(map.points.size(), threads, [&](std::size_t idx) {
        const double phi = phases[idx / ratios.size()];
        const double r = ratios[idx % ratios.size()];
        ChainSpec s = ChainSpec::common_phase(base.n_sites, aJ, r * aJ, phi, gamma, Boundary::open);
        GainMapPoint p;
        p.phase = phi;
        p.ratio = r;
        auto st = stability_report(s);
        p.growth_rate = st.growth_rate;
        try {
            p.label = classify_phase(s, n_k).label;
        } catch (const phase_boundary_error&) {
            if (!st.stable && !st.marginal) p.label = Regime::obc_unstable;
        }
        if (st.stable) {
            auto chi = susceptibility(s, 0.0);
            p.gain = std::abs(chi.x_to_x(0, s.n_sites - 1));
        }
        map.points[idx] = p;
    });
    return map;
}

struct NonreciprocityReport {
    double chi_norm = 0.0;              // max-row-sum norm
    double max_p_to_x = 0.0;            // largest |chi_{p_i -> x_j}|
    double min_neighbor_x_to_p = 0.0;   // smallest |chi_{x_j -> p_{j +- 1}}| over neighbours
    double max_distant_x_to_p = 0.0;    // largest |chi_{x_j -> p_k}| for non-neighbours (k != j)
    double max_onsite_x_to_p = 0.0;
    double boundary_mismatch = 0.0;     // interior-column difference between open and periodic chains
    bool p_to_x_forbidden = false;
    bool neighbor_confined = false;
};

namespace detail {

inline bool neighbours(int n, int a, int b, Boundary bc) {
    const int d = std::abs(a - b);
    if (d == 1) return true;
    return bc == Boundary::periodic && n > 2 && d == n - 1;
}

} // namespace detail

inline NonreciprocityReport nonreciprocity_report(const ChainSpec& s) {
    s.validate();
    if (s.detuned()) throw std::invalid_argument("nonreciprocity_report: requires zero detuning");
    const bool trivial = s.hopping == cd(0.0) && s.squeezing == cd(0.0);
    if (!trivial) {
        if (std::abs(std::abs(s.hopping) - std::abs(s.squeezing)) > 1e-12 * std::abs(s.hopping))
            throw std::invalid_argument("nonreciprocity_report: requires |lambda| = |J|");
        if (std::abs(std::sin(s.phase())) > 1e-12 || !s.has_common_phase())
            throw std::invalid_argument("nonreciprocity_report: requires phi = 0");
    }
    const int n = s.n_sites;
    auto chi = susceptibility(s, 0.0);
    NonreciprocityReport r;
    r.chi_norm = num::inf_norm(chi.chi);
    r.min_neighbor_x_to_p = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            r.max_p_to_x = std::max(r.max_p_to_x, std::abs(chi.p_to_x(a, b)));
            const double v = std::abs(chi.x_to_p(a, b));
            if (a == b) r.max_onsite_x_to_p = std::max(r.max_onsite_x_to_p, v);
            else if (detail::neighbours(n, a, b, s.boundary)) r.min_neighbor_x_to_p = std::min(r.min_neighbor_x_to_p, v);
            else r.max_distant_x_to_p = std::max(r.max_distant_x_to_p, v);
        }
    }
    if (n < 2) r.min_neighbor_x_to_p = 0.0;
    if (n >= 3) {
        ChainSpec other = s;
        other.boundary = s.boundary == Boundary::open ? Boundary::periodic : Boundary::open;
        auto chi2 = susceptibility(other, 0.0);
        for (int a = 1; a + 1 < n; ++a)
            for (int b = 0; b < 2 * n; ++b)
                r.boundary_mismatch = std::max(r.boundary_mismatch, std::abs(chi.chi(b, a) - chi2.chi(b, a)));
    }
    const double tol = 1e-12 * r.chi_norm;
    r.p_to_x_forbidden = r.max_p_to_x <= tol;
    r.neighbor_confined = r.max_distant_x_to_p <= tol;
    return r;
}

} // namespace bkc
