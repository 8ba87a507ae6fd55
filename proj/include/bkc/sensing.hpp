#pragma once

// Detuning sensing on the open chain: chi_{x1 -> p1} under a detuning of one site.

#include <cmath>
#include <numeric>
#include <vector>

#include "bkc/chain_model.hpp"
#include "bkc/response.hpp"

namespace bkc {

struct SensingPoint {
    double epsilon = 0.0;
    cd direct;       // chi_{x1 -> p1} from inverting the detuned matrix
    cd rank_one;     // update formula built from the undetuned chi
    SusceptibilityMatrix full;
};

namespace detail {

inline void require_sensing_spec(const ChainSpec& s) {
    s.validate();
    if (s.boundary != Boundary::open) throw std::invalid_argument("sensing: requires open boundary");
    if (s.detuned()) throw std::invalid_argument("sensing: base spec must be undetuned");
    if (s.hopping != cd(0.0) || s.squeezing != cd(0.0)) {
        if (!s.has_common_phase() || std::abs(std::cos(s.phase())) > 1e-12)
            throw std::invalid_argument("sensing: requires phi = pi/2");
    }
}

} // namespace detail

// Detuning eps on `site` (default: last site). With phi = pi/2 the x and p blocks decouple and
//   chi_{x1->p1}(eps) = (-1)^N eps chi_{x1->xN}^2 / (1 + eps^2 chi_{xN->xN}^2)
// holds exactly for the last site; the rank-one column is that expression.
inline SensingPoint sensing_susceptibility(const ChainSpec& base, double eps, int site = -1) {
    detail::require_sensing_spec(base);
    const int n = base.n_sites;
    if (site < 0) site = n - 1;
    if (site >= n) throw std::invalid_argument("sensing: site out of range");
    ChainSpec s = base;
    s.detuning[site] = eps;
    SensingPoint pt;
    pt.epsilon = eps;
    pt.full = susceptibility(s, 0.0);
    pt.direct = pt.full.x_to_p(0, 0);
    auto chi0 = susceptibility(base, 0.0);
    const cd a = chi0.x_to_x(0, n - 1);
    const cd d = chi0.x_to_x(n - 1, n - 1);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    pt.rank_one = sign * eps * a * a / (1.0 + eps * eps * d * d);
    return pt;
}

// R = gamma |d chi_{x1->p1} / d eps| at eps = 0; central difference with one Richardson step.
inline double responsivity(const ChainSpec& s, double rel_step = 1e-6) {
    detail::require_sensing_spec(s);
    const double g = s.gamma();
    const double h = rel_step * g;
    auto f = [&](double e) { return sensing_susceptibility(s, e).direct; };
    auto D = [&](double hh) { return (f(hh) - f(-hh)) / (2.0 * hh); };
    const cd d = (4.0 * D(0.5 * h) - D(h)) / 3.0;
    return g * std::abs(d);
}

// gamma |chi_{x1 -> xN}|^2 and the EP-family value 4 G^{2(N-1)} / gamma
inline double responsivity_closed_form(const ChainSpec& s) {
    detail::require_sensing_spec(s);
    auto chi = susceptibility(s, 0.0);
    return s.gamma() * std::norm(chi.x_to_x(0, s.n_sites - 1));
}

inline double responsivity_ep(int n, double G, double gamma) {
    return 4.0 / gamma * std::pow(G, 2.0 * (n - 1));
}

struct ScalingSweep {
    std::vector<int> n;
    std::vector<double> responsivity;
    double log_slope = 0.0;  // least-squares slope of ln R against N
    double log_intercept = 0.0;
};

inline ScalingSweep scaling_sweep(const ChainSpec& base, int n_min, int n_max) {
    if (n_min < 1 || n_max < n_min) throw std::invalid_argument("scaling_sweep: bad N range");
    ScalingSweep out;
    for (int n = n_min; n <= n_max; ++n) {
        ChainSpec s = base;
        s.n_sites = n;
        s.damping.assign(n, base.gamma());
        s.detuning.assign(n, 0.0);
        out.n.push_back(n);
        out.responsivity.push_back(responsivity(s));
    }
    const double m = static_cast<double>(out.n.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < out.n.size(); ++i) {
        const double x = out.n[i], y = std::log(out.responsivity[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double den = m * sxx - sx * sx;
    out.log_slope = den != 0 ? (m * sxy - sx * sy) / den : 0.0;
    out.log_intercept = (sy - out.log_slope * sx) / m;
    return out;
}

} // namespace bkc
