#pragma once

// Thermal steady states of the linear chain driven by independent baths.

#include <cmath>
#include <limits>
#include <vector>

#include "bkc/chain_model.hpp"
#include "bkc/numerics.hpp"
#include "bkc/response.hpp"

namespace bkc {

struct CovarianceMatrix {
    RMat sigma;                        // symmetrised second moments, vacuum 1/2 included
    std::vector<double> n_th;
    std::vector<double> populations;   // (S_xx + S_pp - 1)/2
    // Same chain driven by the thermal part only (noise gamma n_th): (S_xx + S_pp)/2.
    // This is the large-n_th reading used by the closed forms.
    std::vector<double> classical_populations;
};

namespace detail {

inline std::vector<double> expand_baths(const ChainSpec& s, const std::vector<double>& n_th) {
    const auto n = static_cast<std::size_t>(s.n_sites);
    std::vector<double> out;
    if (n_th.size() == 1) out.assign(n, n_th.front());
    else if (n_th.size() == n) out = n_th;
    else throw std::invalid_argument("n_th must have 1 or n_sites entries");
    for (double v : out)
        if (!std::isfinite(v) || v < 0) throw std::invalid_argument("n_th must be finite and non-negative");
    return out;
}

inline RMat noise_matrix(const ChainSpec& s, const std::vector<double>& occ, double vacuum) {
    const int n = s.n_sites;
    RMat D = RMat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        D(j, j) = s.damping[j] * (occ[j] + vacuum);
        D(n + j, n + j) = D(j, j);
    }
    return D;
}

} // namespace detail

inline CovarianceMatrix steady_covariance(const ChainSpec& s, const std::vector<double>& n_th) {
    s.validate();
    CovarianceMatrix c;
    c.n_th = detail::expand_baths(s, n_th);
    RMat M = build_dynamical_matrix(s);
    c.sigma = num::solve_lyapunov(M, detail::noise_matrix(s, c.n_th, 0.5));
    RMat cl = num::solve_lyapunov(M, detail::noise_matrix(s, c.n_th, 0.0));
    const int n = s.n_sites;
    for (int j = 0; j < n; ++j) {
        c.populations.push_back(0.5 * (c.sigma(j, j) + c.sigma(n + j, n + j) - 1.0));
        c.classical_populations.push_back(0.5 * (cl(j, j) + cl(n + j, n + j)));
    }
    return c;
}

// Four-site closed forms (J = lambda = i mu, uniform baths). site is 0-based.
inline double closed_form_population(double G, double n_th, Boundary b, int site) {
    if (!(G >= 0) || !std::isfinite(G)) throw std::domain_error("closed_form_population: G must be finite and >= 0");
    if (site < 0 || site > 3) throw std::domain_error("closed_form_population: four-site chain, site in [0, 3]");
    const double G2 = G * G;
    if (b == Boundary::periodic) {
        if (G >= 1.0) throw not_hurwitz_error("closed_form_population: periodic chain unstable for G >= 1",
                                              cd(0.5 * (G - 1.0), 0.0));
        return n_th * (1.0 + 0.5 * G2 / (1.0 - G2));
    }
    if (site == 0 || site == 3) return n_th * (1.0 + G2 / 4.0 + 3.0 * G2 * G2 / 16.0 + 5.0 * G2 * G2 * G2 / 32.0);
    return n_th * (1.0 + G2 / 2.0 + 3.0 * G2 * G2 / 16.0);
}

struct ThermalSpectrum {
    std::vector<double> omega;
    std::vector<std::vector<double>> psd;  // psd[site][i]
};

// S_j(w) = 1/2 [chi D chi^H]_{x_j x_j} + 1/2 [chi D chi^H]_{p_j p_j}, normalised so that
// the integral over w equals 2 pi (n_j + 1/2). The frequency axis follows chi's sign.
inline ThermalSpectrum thermal_spectrum(const ChainSpec& s, const std::vector<double>& n_th,
                                        const std::vector<double>& omega, unsigned threads = 1) {
    s.validate();
    auto occ = detail::expand_baths(s, n_th);
    RMat M = build_dynamical_matrix(s);
    CVec ev = num::eigenvalues(M);
    if (!(ev(0).real() < 0.0))
        throw not_hurwitz_error("thermal_spectrum: chain is dynamically unstable", ev(0));
    const int n = s.n_sites;
    CMat D = detail::noise_matrix(s, occ, 0.5).cast<cd>();
    ThermalSpectrum out;
    out.omega = omega;
    out.psd.assign(n, std::vector<double>(omega.size(), 0.0));
    parallel_for(omega.size(), threads, [&](std::size_t i) {
        CMat chi = susceptibility(s, omega[i]).chi;
        CMat S = chi * D * chi.adjoint();
        for (int j = 0; j < n; ++j) out.psd[j][i] = 0.5 * (S(j, j).real() + S(n + j, n + j).real());
    });
    return out;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

} // namespace bkc
