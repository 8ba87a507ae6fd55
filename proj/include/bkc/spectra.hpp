#pragma once

// Bloch bands, winding numbers, parity checks and stability of open/periodic chains.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bkc/chain_model.hpp"
#include "bkc/numerics.hpp"

namespace bkc {

struct ComplexSpectrum {
    std::vector<double> k;
    std::vector<cd> plus, minus;  // frequency form, rad/s
    ChainSpec spec;
};

namespace detail {

inline void require_translation_invariant(const ChainSpec& s, const char* who) {
    s.validate();
    if (s.detuned()) throw std::invalid_argument(std::string(who) + ": requires zero detuning");
    if (!s.uniform_damping()) throw std::invalid_argument(std::string(who) + ": requires uniform damping");
    if (!s.has_common_phase()) throw std::invalid_argument(std::string(who) + ": J and lambda need a common phase");
}

// sqrt(|lambda|^2 - |J|^2 cos^2 phi), imaginary in the closed-gap case
inline cd gap_root(const ChainSpec& s) {
    const double c = std::abs(s.hopping) * std::cos(s.phase());
    const double l = std::abs(s.squeezing);
    return std::sqrt(cd(l * l - c * c, 0.0));
}

inline double spectral_scale(const ChainSpec& s) {
    return 0.5 * s.gamma() + 2.0 * std::abs(s.hopping) + 2.0 * std::abs(s.squeezing);
}

} // namespace detail

// Closed-form bands w_+(k), w_-(k).
inline std::pair<cd, cd> closed_form_bands(const ChainSpec& s, double k) {
    const double g = s.gamma();
    const double a = 2.0 * std::abs(s.hopping) * std::sin(s.phase());
    const cd b = 2.0 * cd(0, 1) * detail::gap_root(s) * std::cos(k);
    const cd c = cd(0, -0.5 * g) - a * std::sin(k);
    return {c - b, c + b};
}

// Eigenvalues of the Bloch matrix on a uniform k grid, continued by continuity.
inline ComplexSpectrum bloch_bands(const ChainSpec& s, int n_k = 4096) {
    detail::require_translation_invariant(s, "bloch_bands");
    if (n_k < 64) throw std::invalid_argument("bloch_bands: n_k must be >= 64");
    const double scale = detail::spectral_scale(s);

    ComplexSpectrum out;
    out.spec = s;
    out.k.resize(n_k);
    out.plus.resize(n_k);
    out.minus.resize(n_k);
    for (int i = 0; i < n_k; ++i) {
        const double k = 2.0 * std::numbers::pi * i / n_k;
        out.k[i] = k;
        CVec e = num::eigenvalues(bloch_matrix(s, k));
        cd e0 = e(0), e1 = e(1);
        cd target;
        if (i < 2) {
            target = closed_form_bands(s, k).first;
        } else {
            target = 2.0 * out.plus[i - 1] - out.plus[i - 2];
        }
        const double d0 = std::abs(e0 - target), d1 = std::abs(e1 - target);
        // distinct eigenvalues equally far from the prediction cannot be assigned; splittings
        // below ~sqrt(eps) are round-off of a defective (coincident-band) Bloch matrix
        if (std::abs(d0 - d1) <= 1e-12 * scale && std::abs(e0 - e1) > 1e-5 * scale)
            throw band_tracking_error("bloch_bands: ambiguous band continuation near a degeneracy");
        if (d0 > d1) std::swap(e0, e1);
        out.plus[i] = e0;
        out.minus[i] = e1;
    }
    return out;
}

// Origin enclosed by band w_+ (an ellipse centred at -i gamma/2) and its orientation.
inline std::pair<int, int> geometric_winding(const ChainSpec& s) {
    detail::require_translation_invariant(s, "geometric_winding");
    const double tol = 1e-9 * detail::spectral_scale(s);
    const cd root = detail::gap_root(s);
    const double g = s.gamma();
    const double a = 2.0 * std::abs(s.hopping) * std::sin(s.phase());
    if (std::abs(root.imag()) > 0.0 && root.real() == 0.0) {
        // closed gap: bands are horizontal segments at Im w = -gamma/2
        if (0.5 * g <= tol) throw phase_boundary_error("on phase boundary");
        return {0, 0};
    }
    const double b = 2.0 * root.real();
    if (std::abs(a) <= tol) {
        if (b >= 0.5 * g - tol) throw phase_boundary_error("on phase boundary");
        return {0, 0};
    }
    if (std::abs(b - 0.5 * g) <= tol) throw phase_boundary_error("on phase boundary");
    if (b < 0.5 * g) return {0, 0};
    const int nu = a > 0 ? -1 : 1;
    return {nu, -nu};
}

// Winding of each band about the origin by the discrete argument principle.
inline std::pair<int, int> winding_numbers(const ChainSpec& s, int n_k = 4096) {
    geometric_winding(s);  // raises on the phase boundary
    const double tol = 1e-9 * detail::spectral_scale(s);
    // near the boundary the curve passes close to the origin; refine until increments resolve
    for (;;) {
        auto bands = bloch_bands(s, n_k);
        try {
            const int p = num::winding_from_samples(bands.plus, cd(0.0), tol);
            const int m = num::winding_from_samples(bands.minus, cd(0.0), tol);
            return {p, m};
        } catch (const sampling_error&) {
            if (n_k >= (1 << 20)) throw;
            n_k *= 4;
        }
    }
}

struct StabilityReport {
    Boundary boundary = Boundary::open;
    double growth_rate = 0.0;  // max Re s, rad/s
    bool stable = true;        // growth_rate < 0
    bool marginal = false;     // |growth_rate| <= 1e-9 gamma_max
    bool has_closed_form = false;
    double threshold = std::numeric_limits<double>::quiet_NaN();          // |lambda| at onset, consistent form
    double printed_threshold = std::numeric_limits<double>::quiet_NaN();  // |lambda| at onset, printed form
    bool closed_form_agrees = false;  // eigenvalue sign matches the consistent closed form
};

// Onset |lambda| for the open chain: |lambda|^2 = |J|^2 + (gamma/4)^2 sec^2(pi N/(N+1)).
inline double obc_threshold(int n, double hop_abs, double gamma) {
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double c = std::cos(std::numbers::pi * n / (n + 1.0));
    return std::sqrt(hop_abs * hop_abs + std::pow(gamma / 4.0, 2) / (c * c));
}

// Same formula with gamma/2 in place of gamma/4, as it is usually quoted.
inline double obc_threshold_printed(int n, double hop_abs, double gamma) {
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double c = std::cos(std::numbers::pi * n / (n + 1.0));
    return std::sqrt(hop_abs * hop_abs + std::pow(gamma / 2.0, 2) / (c * c));
}

inline StabilityReport stability_report(const ChainSpec& s) {
    s.validate();
    StabilityReport r;
    r.boundary = s.boundary;
    RMat M = build_dynamical_matrix(s);
    r.growth_rate = num::spectral_abscissa(M);
    const double gmax = *std::max_element(s.damping.begin(), s.damping.end());
    r.stable = r.growth_rate < 0.0;
    r.marginal = std::abs(r.growth_rate) <= 1e-9 * gmax;
    if (s.boundary == Boundary::open && !s.detuned() && s.uniform_damping() && s.has_common_phase()) {
        r.has_closed_form = true;
        r.threshold = obc_threshold(s.n_sites, std::abs(s.hopping), s.gamma());
        r.printed_threshold = obc_threshold_printed(s.n_sites, std::abs(s.hopping), s.gamma());
        const bool predicted_unstable = std::abs(s.squeezing) > r.threshold;
        r.closed_form_agrees = r.marginal || predicted_unstable == !r.stable;
    }
    return r;
}

inline StabilityReport obc_stability_report(ChainSpec s) {
    s.boundary = Boundary::open;
    return stability_report(s);
}

// Bisection on |lambda| (fixed |J|, phase, gamma) for the sign change of the growth rate.
inline double instability_onset(ChainSpec s, double lo, double hi, double rel_tol = 1e-12) {
    const double phi = s.phase();
    auto rate_phi = [&](double l) {
        s.squeezing = l * unit_phasor(phi);
        return num::spectral_abscissa(build_dynamical_matrix(s));
    };
    double flo = rate_phi(lo), fhi = rate_phi(hi);
    if (!(flo < 0.0 && fhi > 0.0)) throw std::invalid_argument("instability_onset: bracket does not straddle onset");
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (rate_phi(mid) < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Intertwiner of the parity relation B(k + pi/2) P = P B(-k + pi/2), built from V.
inline CMat parity_operator(const ChainSpec& s) {
    if (s.hopping == cd(0.0) && s.squeezing == cd(0.0)) return CMat::Identity(2, 2);
    ChainSpec clean = s;
    std::fill(clean.detuning.begin(), clean.detuning.end(), 0.0);
    CMat V = local_quadrature_transform(clean).V;
    CMat sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    return V * sx * V.inverse();
}

inline double parity_symmetry_residual(const ChainSpec& s, double k) {
    detail::require_translation_invariant(s, "parity_symmetry_residual");
    if (s.hopping == cd(0.0) && s.squeezing == cd(0.0)) return 0.0;
    CMat P = parity_operator(s);
    const double h = 0.5 * std::numbers::pi;
    CMat R = bloch_matrix(s, k + h) * P - P * bloch_matrix(s, -k + h);
    return num::inf_norm(R);
}

// Real-space analogue: W = P (x) Pi with Pi the staggered site reversal, acting on the
// mode generator. Detuning on any site breaks the commutation.
inline double real_space_parity_residual(const ChainSpec& s) {
    s.validate();
    if (!s.uniform_damping()) throw std::invalid_argument("real_space_parity_residual: requires uniform damping");
    const int n = s.n_sites;
    if (s.boundary == Boundary::periodic && n % 2 == 1)
        throw std::invalid_argument("real_space_parity_residual: staggered reflection needs even N under PBC");
    CMat P = parity_operator(s);
    CMat W = CMat::Zero(2 * n, 2 * n);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int j = 0; j < n; ++j)
                W(a * n + (n - 1 - j), b * n + j) = P(a, b) * (j % 2 == 0 ? 1.0 : -1.0);
    CMat K = mode_generator(s);
    return num::inf_norm(CMat(W * K - K * W));
}

enum class Regime { point_gap_closed, point_gap_open_trivial, nontrivial_winding, obc_unstable };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::point_gap_closed: return "point-gap-closed";
        case Regime::point_gap_open_trivial: return "point-gap-open-trivial";
        case Regime::nontrivial_winding: return "nontrivial-winding";
        default: return "obc-unstable";
    }
}

struct PhaseClassification {
    Regime label = Regime::point_gap_closed;
    int nu_plus = 0, nu_minus = 0;
    double point_gap_value = 0.0;  // |lambda| - |J||cos phi|, > 0 when open
    double winding_value = 0.0;   // 2 sqrt(|lambda|^2 - |J|^2 cos^2 phi) - gamma/2 (NaN if gap closed)
    double obc_value = 0.0;        // |lambda| / onset |lambda|, > 1 when unstable
    double obc_growth_rate = 0.0;
};

inline PhaseClassification classify_phase(const ChainSpec& s, int n_k = 4096) {
    detail::require_translation_invariant(s, "classify_phase");
    PhaseClassification c;
    const double aJ = std::abs(s.hopping), aL = std::abs(s.squeezing);
    c.point_gap_value = aL - aJ * std::abs(std::cos(s.phase()));
    const cd root = detail::gap_root(s);
    c.winding_value = root.imag() != 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                         : 2.0 * root.real() - 0.5 * s.gamma();
    auto obc = obc_stability_report(s);
    c.obc_growth_rate = obc.growth_rate;
    c.obc_value = aL / obc.threshold;
    if (!obc.stable && !obc.marginal) {
        c.label = Regime::obc_unstable;
        // topology still reported when off the boundary
        try {
            auto w = winding_numbers(s, n_k);
            c.nu_plus = w.first;
            c.nu_minus = w.second;
        } catch (const phase_boundary_error&) {
        }
        return c;
    }
    auto w = winding_numbers(s, n_k);
    c.nu_plus = w.first;
    c.nu_minus = w.second;
    if (c.nu_plus != 0) c.label = Regime::nontrivial_winding;
    else if (c.point_gap_value > 0) c.label = Regime::point_gap_open_trivial;
    else c.label = Regime::point_gap_closed;
    return c;
}

} // namespace bkc
