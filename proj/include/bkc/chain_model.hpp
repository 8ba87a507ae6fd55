#pragma once

// Chain parameterisation and real-space quadrature generators.
//
// Basis: q = (x_1..x_N, p_1..p_N), x = (a + a^dag)/sqrt2, p = -i(a - a^dag)/sqrt2.
// Time convention: dq/dt = M q. Band frequencies w relate to rates s by s = -i w.

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bkc/numerics.hpp"

namespace bkc {

enum class Boundary { open, periodic };

inline const char* to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

inline Boundary boundary_from_string(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary '" + s + "' (expected open or periodic)");
}

// e^{i phi}, exact at multiples of pi/2 so that e.g. J = i mu has no stray real part.
inline cd unit_phasor(double phi) {
    const double q = phi / (0.5 * std::numbers::pi);
    const double r = std::round(q);
    if (std::abs(q - r) < 1e-15 * std::max(1.0, std::abs(q))) {
        switch (((static_cast<long long>(r) % 4) + 4) % 4) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    return {std::cos(phi), std::sin(phi)};
}

inline cd rate_from_frequency(cd w) { return cd(0, -1) * w; }
inline cd frequency_from_rate(cd s) { return cd(0, 1) * s; }

struct ChainSpec {
    int n_sites = 1;
    cd hopping{0.0, 0.0};    // J, rad/s
    cd squeezing{0.0, 0.0};  // lambda, rad/s
    std::vector<double> damping;   // gamma_j, rad/s
    std::vector<double> detuning;  // eps_j, rad/s
    Boundary boundary = Boundary::open;

    // Single phase for both couplings: J = |J| e^{i phi}, lambda = |lambda| e^{i phi}.
    static ChainSpec common_phase(int n, double hop_abs, double sq_abs, double phi, double gamma,
                                  Boundary b = Boundary::open) {
        if (hop_abs < 0 || sq_abs < 0) throw std::invalid_argument("coupling magnitudes must be non-negative");
        ChainSpec s;
        s.n_sites = n;
        s.hopping = hop_abs * unit_phasor(phi);
        s.squeezing = sq_abs * unit_phasor(phi);
        s.damping.assign(static_cast<std::size_t>(std::max(n, 0)), gamma);
        s.detuning.assign(static_cast<std::size_t>(std::max(n, 0)), 0.0);
        s.boundary = b;
        s.validate();
        return s;
    }

    void validate() const {
        if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
        if (damping.size() != static_cast<std::size_t>(n_sites))
            throw std::invalid_argument("damping list must have n_sites entries");
        if (detuning.size() != static_cast<std::size_t>(n_sites))
            throw std::invalid_argument("detuning list must have n_sites entries");
        auto finite = [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        if (!finite(hopping) || !finite(squeezing)) throw std::invalid_argument("non-finite coupling");
        for (double g : damping)
            if (!std::isfinite(g) || g < 0) throw std::invalid_argument("damping must be finite and non-negative");
        for (double e : detuning)
            if (!std::isfinite(e)) throw std::invalid_argument("non-finite detuning");
        if (boundary == Boundary::periodic && n_sites == 1)
            throw std::invalid_argument("periodic boundary needs n_sites >= 2 (self-link is ambiguous)");
    }

    // Common phase; falls back to arg(lambda) when J = 0.
    double phase() const {
        if (hopping != cd(0.0)) return std::arg(hopping);
        if (squeezing != cd(0.0)) return std::arg(squeezing);
        return 0.0;
    }

    bool has_common_phase(double tol = 1e-12) const {
        if (hopping == cd(0.0) || squeezing == cd(0.0)) return true;
        return std::abs(std::arg(hopping / squeezing)) <= tol;
    }

    bool uniform_damping() const {
        for (double g : damping)
            if (g != damping.front()) return false;
        return true;
    }

    double gamma() const {
        if (!uniform_damping()) throw std::domain_error("uniform damping required");
        return damping.front();
    }

    bool detuned() const {
        for (double e : detuning)
            if (e != 0.0) return true;
        return false;
    }

    // G = 4|lambda|/gamma
    double per_link_gain() const {
        const double g = gamma();
        if (!(g > 0)) throw std::domain_error("per-link gain needs gamma > 0");
        return 4.0 * std::abs(squeezing) / g;
    }
};

// Exceptional-point family: J = lambda = i mu with mu = G gamma / 4.
inline ChainSpec ep_chain(int n, double G, double gamma, Boundary b = Boundary::open) {
    const double mu = G * gamma / 4.0;
    ChainSpec s;
    s.n_sites = n;
    s.hopping = cd(0.0, mu);
    s.squeezing = cd(0.0, mu);
    s.damping.assign(static_cast<std::size_t>(std::max(n, 0)), gamma);
    s.detuning.assign(static_cast<std::size_t>(std::max(n, 0)), 0.0);
    s.boundary = b;
    s.validate();
    return s;
}

namespace detail {

// da_l/dt += c a_m + d a_m^dag, written into the quadrature generator
inline void add_mode_term(RMat& M, int n, int l, int m, cd c, cd d) {
    const cd sp = c + d, sm = c - d;
    M(l, m) += sp.real();
    M(l, n + m) += -sm.imag();
    M(n + l, m) += sp.imag();
    M(n + l, n + m) += sm.real();
}

} // namespace detail

// Heisenberg-Langevin generator of H = sum_j [J a_{j+1}^dag a_j + lambda a_{j+1}^dag a_j^dag + h.c.]
//   - sum_j eps_j a_j^dag a_j, with damping gamma_j/2 on each mode.
inline RMat build_dynamical_matrix(const ChainSpec& s) {
    s.validate();
    const int n = s.n_sites;
    RMat M = RMat::Zero(2 * n, 2 * n);
    const cd mi(0.0, -1.0);
    const cd J = s.hopping, L = s.squeezing;
    auto link = [&](int j, int jp) {
        // a_{jp} driven by a_j, and a_j driven by a_{jp}
        detail::add_mode_term(M, n, jp, j, mi * J, mi * L);
        detail::add_mode_term(M, n, j, jp, mi * std::conj(J), mi * L);
    };
    for (int j = 0; j + 1 < n; ++j) link(j, j + 1);
    if (s.boundary == Boundary::periodic) link(n - 1, 0);
    for (int l = 0; l < n; ++l) {
        M(l, l) -= 0.5 * s.damping[l];
        M(n + l, n + l) -= 0.5 * s.damping[l];
        const double e = s.detuning[l];
        M(l, n + l) -= e;
        M(n + l, l) += e;
    }
    return M;
}

// q -> alpha = (a_1..a_N, a_1^dag..a_N^dag)
inline CMat mode_transform(int n) {
    const double r = 1.0 / std::sqrt(2.0);
    CMat T = CMat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        T(j, j) = r;
        T(j, n + j) = cd(0, r);
        T(n + j, j) = r;
        T(n + j, n + j) = cd(0, -r);
    }
    return T;
}

// Generator of d alpha/dt in the (a, a^dag) basis.
inline CMat mode_generator(const ChainSpec& s) {
    const int n = s.n_sites;
    CMat T = mode_transform(n);
    return T * build_dynamical_matrix(s).cast<cd>() * T.adjoint();
}

// 2x2 Bloch matrix for (a_k, a_{-k}^dag), frequency form (rates are -i times its eigenvalues).
inline CMat bloch_matrix(const ChainSpec& s, double k) {
    s.validate();
    if (s.detuned()) throw std::invalid_argument("bloch_matrix: detuning breaks translation invariance");
    const double g = s.gamma();
    const cd J = s.hopping, L = s.squeezing;
    const cd e(std::cos(k), std::sin(k));
    const cd ie(0.0, 1.0);
    CMat B(2, 2);
    B(0, 0) = -ie * g / 2.0 + J * e + std::conj(J) * std::conj(e);
    B(0, 1) = 2.0 * L * std::cos(k);
    B(1, 0) = -2.0 * std::conj(L) * std::cos(k);
    B(1, 1) = -ie * g / 2.0 - (J * std::conj(e) + std::conj(J) * e);
    return B;
}

enum class GapKind { open, closed };

struct LocalQuadratureTransform {
    CMat V;          // columns |Psi+>, |Psi->
    double y = 0.0;  // |J/lambda| cos(phi)
    GapKind gap = GapKind::open;
    double eta = 0.0;  // cos(eta) = y, open gap
    double xi = 0.0;   // cosh(xi) = y, closed gap
};

// k-independent eigenvectors of the Bloch matrix.
inline LocalQuadratureTransform local_quadrature_transform(const ChainSpec& s, double coalescence_tol = 1e-12) {
    s.validate();
    if (s.detuned()) throw std::invalid_argument("local_quadrature_transform: requires zero detuning");
    if (!s.has_common_phase()) throw std::invalid_argument("local_quadrature_transform: J and lambda need a common phase");
    const double aJ = std::abs(s.hopping), aL = std::abs(s.squeezing);
    if (aJ == 0.0 && aL == 0.0) throw std::invalid_argument("local_quadrature_transform: J and lambda both zero");
    const double phi = s.phase();
    const cd ph = unit_phasor(phi);
    LocalQuadratureTransform t;
    t.V.resize(2, 2);
    if (aL == 0.0) {
        // pure hopping: Bloch matrix is diagonal, |y| -> infinity
        t.y = std::numeric_limits<double>::infinity();
        t.gap = GapKind::closed;
        t.xi = std::numeric_limits<double>::infinity();
        t.V << cd(0.0), -ph, cd(1.0), cd(0.0);
        return t;
    }
    t.y = aJ / aL * std::cos(phi);
    const double y = t.y;
    if (std::abs(std::abs(y) - 1.0) <= coalescence_tol) {
        std::ostringstream os;
        os << "local_quadrature_transform: |y| = 1 (y = " << y << "), eigenvectors coalesce";
        throw coalescent_error(os.str());
    }
    const cd root = std::sqrt(cd(y * y - 1.0, 0.0));
    if (std::abs(y) < 1.0) {
        t.gap = GapKind::open;
        t.eta = std::acos(y);
    } else {
        t.gap = GapKind::closed;
        t.xi = std::acosh(std::abs(y));
    }
    CVec p(2), m(2);
    p << ph * (-y + root), 1.0;
    m << ph * (-y - root), 1.0;
    t.V.col(0) = p.normalized();
    t.V.col(1) = m.normalized();
    return t;
}

} // namespace bkc
