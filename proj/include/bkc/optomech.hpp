#pragma once

// Bad-cavity optomechanical hardware description shared by the tone compiler and the
// nonlinear dynamics. Mode frequencies are the operating (spring-shifted) frequencies.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bkc {

// Lorentzian cavity response h(u) = 1/(1+u^2) and its first three derivatives.
inline double cavity_response(double u) { return 1.0 / (1.0 + u * u); }
inline double cavity_response_d1(double u) { return -2.0 * u / std::pow(1.0 + u * u, 2); }
inline double cavity_response_d2(double u) { return (6.0 * u * u - 2.0) / std::pow(1.0 + u * u, 3); }
inline double cavity_response_d3(double u) { return -24.0 * u * (u * u - 1.0) / std::pow(1.0 + u * u, 4); }

// Detuning of maximal spring shift, where h'' vanishes.
inline double max_spring_detuning(double kappa) { return kappa / (2.0 * std::sqrt(3.0)); }

struct OptomechanicalParams {
    std::vector<double> omega;  // operating mode frequencies, rad/s
    std::vector<double> g0;     // vacuum couplings, rad/s
    double kappa = 0.0;         // cavity linewidth, rad/s
    double detuning = 0.0;      // control laser detuning, rad/s
    double n_max = 0.0;         // photon number on resonance
    double x_zpf = 1.0;         // displacement unit, z = x / x_zpf

    int n_modes() const { return static_cast<int>(omega.size()); }
    double u0() const { return 2.0 * detuning / kappa; }
    double mean_photons() const { return n_max * cavity_response(u0()); }

    // delta omega_j = 2 g_j^2 Delta / (Delta^2 + kappa^2/4) with g_j^2 = nbar g0_j^2
    double spring_shift(int j) const {
        const double g2 = mean_photons() * g0.at(static_cast<std::size_t>(j)) * g0[static_cast<std::size_t>(j)];
        return 2.0 * g2 * detuning / (detuning * detuning + 0.25 * kappa * kappa);
    }

    double bare_frequency(int j) const { return omega.at(static_cast<std::size_t>(j)) - spring_shift(j); }

    bool at_max_spring_shift(double rel_tol = 1e-9) const {
        return std::abs(std::abs(detuning) - max_spring_detuning(kappa)) <= rel_tol * max_spring_detuning(kappa);
    }

    void validate() const {
        if (omega.empty()) throw std::invalid_argument("optomechanical params: no modes");
        if (g0.size() != omega.size()) throw std::invalid_argument("optomechanical params: g0 needs one entry per mode");
        for (double w : omega)
            if (!std::isfinite(w) || !(w > 0)) throw std::invalid_argument("mode frequencies must be positive");
        for (double g : g0)
            if (!std::isfinite(g) || g < 0) throw std::invalid_argument("g0 must be finite and non-negative");
        if (!std::isfinite(kappa) || !(kappa > 0)) throw std::invalid_argument("kappa must be positive");
        if (!std::isfinite(detuning)) throw std::invalid_argument("non-finite detuning");
        if (!std::isfinite(n_max) || n_max < 0) throw std::invalid_argument("n_max must be non-negative");
        if (!std::isfinite(x_zpf) || !(x_zpf > 0)) throw std::invalid_argument("x_zpf must be positive");
    }

    // Bad-cavity adiabatic elimination assumes omega_j << kappa.
    std::vector<std::string> validity_warnings(double ratio = 0.2) const {
        std::vector<std::string> out;
        for (int j = 0; j < n_modes(); ++j) {
            const double r = omega[static_cast<std::size_t>(j)] / kappa;
            if (r > ratio) {
                std::ostringstream os;
                os << "mode " << j << ": omega/kappa = " << r << " exceeds " << ratio << " (bad-cavity limit)";
                out.push_back(os.str());
            }
        }
        return out;
    }

    // Parameters at the maximal-spring-shift detuning reproducing given spring shifts.
    // g0_ref sets the vacuum coupling of mode 0; the others follow from their shifts.
    static OptomechanicalParams from_spring_shifts(std::vector<double> omega, const std::vector<double>& shifts,
                                                   double kappa, double g0_ref) {
        if (shifts.size() != omega.size()) throw std::invalid_argument("need one spring shift per mode");
        if (!(g0_ref > 0) || !(kappa > 0)) throw std::invalid_argument("g0_ref and kappa must be positive");
        const double sign = shifts.front() < 0 ? -1.0 : 1.0;
        for (double s : shifts)
            if (s == 0.0 || (s < 0) != (sign < 0))
                throw std::invalid_argument("spring shifts must be non-zero and share one sign");
        OptomechanicalParams p;
        p.omega = std::move(omega);
        p.kappa = kappa;
        p.detuning = sign * max_spring_detuning(kappa);
        // at |u0| = 1/sqrt3: |delta omega| = sqrt3 g0^2 nbar / kappa, nbar = 3/4 n_max
        const double nbar = std::abs(shifts.front()) * kappa / (std::sqrt(3.0) * g0_ref * g0_ref);
        p.n_max = nbar / cavity_response(p.u0());
        for (double s : shifts) p.g0.push_back(std::sqrt(std::abs(s) * kappa / (std::sqrt(3.0) * nbar)));
        p.validate();
        return p;
    }
};

} // namespace bkc
