#pragma once

// Mean-field dynamics with the optomechanical cubic force.
//
// Lab frame: z_i = x_i / x_zpf obeys
//   z_i'' = -w_i^2 z_i - g_i z_i' - sum_{j!=i} t_ij(t) z_j - w_i B (1 + mu(t)) g0_i S^3 + f_i(t),
// with S = sum_j g0_j z_j, mu(t) = sum_m c_m cos(w_m t + phi_m), t_ij = 2 w_i sgn(dw) sqrt(dw_i dw_j) mu(t)
// and B = -(8/3) n_max h'''(u0) / kappa^3, so alpha_ijkl = w_i B g0_i g0_j g0_k g0_l.
// Envelopes: z_i = (a_i e^{-i(nu_i t + phi_i)} + c.c.)/sqrt2 with LO frequencies nu_i; the rotating-wave
// equations are da_i/dt = (linear chain) - i dH/da_i^* with H the secular part of (B/4)(1 + mu) S^4.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "bkc/chain_model.hpp"
#include "bkc/errors.hpp"
#include "bkc/numerics.hpp"
#include "bkc/optomech.hpp"
#include "bkc/tones.hpp"

namespace bkc {

namespace detail {

inline void require_max_spring_shift(const OptomechanicalParams& p) {
    p.validate();
    if (!p.at_max_spring_shift()) {
        std::ostringstream os;
        os << "cubic expansion needs detuning = +/-kappa/(2 sqrt3); h''(u0) = " << cavity_response_d2(p.u0());
        throw std::domain_error(os.str());
    }
}

} // namespace detail

// B in alpha_ijkl = w_i B g0_i g0_j g0_k g0_l; equals -/+ 6 sqrt3 nbar / kappa^3 for detuning +/-.
inline double cubic_scale(const OptomechanicalParams& p) {
    detail::require_max_spring_shift(p);
    return -8.0 / 3.0 * p.n_max * cavity_response_d3(p.u0()) / std::pow(p.kappa, 3);
}

// alpha = -6 w dw g0^2 / kappa^2
inline double duffing_coefficient(const OptomechanicalParams& p, int j) {
    detail::require_max_spring_shift(p);
    const auto u = static_cast<std::size_t>(j);
    if (j < 0 || j >= p.n_modes()) throw std::out_of_range("duffing_coefficient: mode index");
    const double r = p.g0[u] / p.kappa;
    return -6.0 * p.omega[u] * p.spring_shift(j) * r * r;
}

// Same coefficient from the third derivative of the cavity response.
inline double duffing_coefficient_from_response(const OptomechanicalParams& p, int j) {
    const double g = p.g0.at(static_cast<std::size_t>(j));
    return p.omega[static_cast<std::size_t>(j)] * cubic_scale(p) * g * g * g * g;
}

// Harmonic-balance frequency shift for oscillation amplitude A (in z units): -dw 9 g0^2 A^2 / (4 kappa^2).
inline double nl_frequency_shift(const OptomechanicalParams& p, int j, double amplitude) {
    const double r = p.g0.at(static_cast<std::size_t>(j)) / p.kappa;
    return -p.spring_shift(j) * 9.0 / 4.0 * r * r * amplitude * amplitude;
}

inline bool nl_shift_valid(const OptomechanicalParams& p, int j, double amplitude, double limit = 0.3) {
    return p.g0.at(static_cast<std::size_t>(j)) * std::abs(amplitude) / p.kappa < limit;
}

// ---- rotating-wave term catalog ----

struct RwaTerm {
    std::vector<int> creators;      // a^dag mode indices, sorted
    std::vector<int> annihilators;  // a mode indices, sorted
    cd coefficient{0.0, 0.0};       // rad/s
    int degeneracy_class = 0;       // 1..4 by index pattern of the parent quartic product
    int tone = -1;                  // -1 for the unmodulated part
    int tone_sign = 0;              // +1 for e^{+i w_m t}, -1 for e^{-i w_m t}
    bool normal_ordering = false;   // commutator remainder; absent from mean-field dynamics

    std::vector<int> modes() const {
        std::vector<int> m = creators;
        m.insert(m.end(), annihilators.begin(), annihilators.end());
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        return m;
    }

    std::string monomial() const {
        std::ostringstream os;
        bool first = true;
        for (int c : creators) {
            os << (first ? "" : " ") << "a" << c + 1 << "^dag";
            first = false;
        }
        for (int a : annihilators) {
            os << (first ? "" : " ") << "a" << a + 1;
            first = false;
        }
        return first ? "1" : os.str();
    }
};

struct RwaTermCatalog {
    std::vector<RwaTerm> terms;
    int n_modes = 0;

    int count(int cls) const {
        int c = 0;
        for (const auto& t : terms) c += t.degeneracy_class == cls;
        return c;
    }

    // Mean-field value of the secular Hamiltonian (classical terms only).
    cd hamiltonian(const CVec& a) const {
        cd h = 0.0;
        for (const auto& t : terms) {
            if (t.normal_ordering) continue;
            cd m = t.coefficient;
            for (int c : t.creators) m *= std::conj(a(c));
            for (int k : t.annihilators) m *= a(k);
            h += m;
        }
        return h;
    }

    // -i dH/da^*
    CVec force(const CVec& a) const {
        CVec f = CVec::Zero(a.size());
        for (const auto& t : terms) {
            if (t.normal_ordering) continue;
            cd rest = t.coefficient;
            for (int k : t.annihilators) rest *= a(k);
            for (std::size_t c = 0; c < t.creators.size(); ++c) {
                if (c > 0 && t.creators[c] == t.creators[c - 1]) continue;
                int mult = 0;
                cd others = rest;
                bool skipped = false;
                for (int d : t.creators) {
                    if (d == t.creators[c]) {
                        ++mult;
                        if (!skipped) {
                            skipped = true;
                            continue;
                        }
                    }
                    others *= std::conj(a(d));
                }
                f(t.creators[c]) += cd(0, -1) * static_cast<double>(mult) * others;
            }
        }
        return f;
    }
};

struct CatalogOptions {
    double commensurate_tol = 1e-6;  // relative to the largest frequency
};

namespace detail {

// Leg types 0..n-1 are a_j, n..2n-1 are a_j^dag.
struct NormalOrderer {
    int n;
    std::map<std::tuple<std::vector<int>, std::vector<int>>, cd> acc;

    void run(std::vector<int> word, cd coef) {
        for (std::size_t i = 0; i + 1 < word.size(); ++i) {
            const bool ann = word[i] < n, cre = word[i + 1] >= n;
            if (ann && cre) {
                if (word[i] == word[i + 1] - n) {
                    std::vector<int> contracted;
                    for (std::size_t k = 0; k < word.size(); ++k)
                        if (k != i && k != i + 1) contracted.push_back(word[k]);
                    run(contracted, coef);
                }
                std::swap(word[i], word[i + 1]);
                run(word, coef);
                return;
            }
        }
        std::vector<int> c, a;
        for (int w : word) (w >= n ? c : a).push_back(w >= n ? w - n : w);
        std::sort(c.begin(), c.end());
        std::sort(a.begin(), a.end());
        acc[{c, a}] += coef;
    }
};

inline int degeneracy_class(const std::vector<int>& legs, int n) {
    std::map<int, int> mult;
    for (int l : legs) ++mult[l % n];
    std::vector<int> m;
    for (auto& [k, v] : mult) m.push_back(v);
    std::sort(m.rbegin(), m.rend());
    if (m == std::vector<int>{4}) return 1;
    if (m == std::vector<int>{3, 1}) return 2;
    if (m == std::vector<int>{2, 2}) return 3;
    if (m == std::vector<int>{2, 1, 1}) return 4;
    return 5;
}

} // namespace detail

// Secular part of (B/4)(1 + mu(t)) S^4 in the frame of the schedule's LOs, expanded exactly and
// normal ordered. Any near-resonance not produced by the programmed tones is rejected.
inline RwaTermCatalog build_rwa_catalog(const OptomechanicalParams& p, const ToneSchedule& sch,
                                        const CatalogOptions& opt = {}) {
    const double B = cubic_scale(p);
    const int n = p.n_modes();
    if (static_cast<int>(sch.lo.size()) != n) throw std::invalid_argument("schedule needs one LO per mode");
    std::vector<double> nu(static_cast<std::size_t>(n)), lo_phase(static_cast<std::size_t>(n));
    for (const auto& o : sch.lo) {
        if (o.mode < 0 || o.mode >= n) throw std::invalid_argument("LO mode out of range");
        nu[static_cast<std::size_t>(o.mode)] = o.frequency;
        lo_phase[static_cast<std::size_t>(o.mode)] = o.phase;
    }
    double scale = *std::max_element(nu.begin(), nu.end());
    for (const auto& t : sch.tones) scale = std::max(scale, t.frequency);
    const double tol = opt.commensurate_tol * scale;

    // tone components: (index, sign, signature, frequency)
    struct Component {
        int tone, sign;
        std::vector<int> signature;
        double frequency;
        cd factor;
    };
    std::vector<Component> comps;
    comps.push_back({-1, 0, std::vector<int>(static_cast<std::size_t>(n), 0), 0.0, 1.0});
    for (std::size_t m = 0; m < sch.tones.size(); ++m) {
        const auto& t = sch.tones[m];
        std::vector<int> sig(static_cast<std::size_t>(n), 0);
        sig[static_cast<std::size_t>(t.j)] += 1;
        sig[static_cast<std::size_t>(t.k)] += t.kind == ToneKind::beam_splitter ? -1 : 1;
        for (int s : {1, -1}) {
            std::vector<int> ss = sig;
            for (auto& v : ss) v *= s;
            comps.push_back({static_cast<int>(m), s, ss, s * t.frequency, 0.5 * t.depth * unit_phasor(s * t.phase)});
        }
    }

    RwaTermCatalog cat;
    cat.n_modes = n;
    std::map<std::tuple<int, int, int, std::vector<int>, std::vector<int>>, cd> merged;
    std::vector<int> legs(4);
    const int types = 2 * n;
    for (legs[0] = 0; legs[0] < types; ++legs[0])
        for (legs[1] = legs[0]; legs[1] < types; ++legs[1])
            for (legs[2] = legs[1]; legs[2] < types; ++legs[2])
                for (legs[3] = legs[2]; legs[3] < types; ++legs[3]) {
                    // a_j carries e^{-i nu_j t}, a_j^dag carries e^{+i nu_j t}
                    std::vector<int> L(static_cast<std::size_t>(n), 0);
                    double leg_freq = 0.0;
                    cd leg_phase = 1.0;
                    double gprod = 1.0;
                    for (int l : legs) {
                        const int j = l % n;
                        const bool dag = l >= n;
                        L[static_cast<std::size_t>(j)] += dag ? -1 : 1;
                        leg_freq += dag ? nu[static_cast<std::size_t>(j)] : -nu[static_cast<std::size_t>(j)];
                        leg_phase *= unit_phasor(dag ? lo_phase[static_cast<std::size_t>(j)]
                                                     : -lo_phase[static_cast<std::size_t>(j)]);
                        gprod *= p.g0[static_cast<std::size_t>(j)];
                    }
                    for (const auto& c : comps) {
                        const bool structural = c.signature == L;
                        if (!structural) {
                            if (std::abs(c.frequency + leg_freq) <= tol) {
                                std::ostringstream os;
                                os << "commensurate frequencies: ";
                                for (int j = 0; j < n; ++j)
                                    if (L[static_cast<std::size_t>(j)] != 0)
                                        os << (L[static_cast<std::size_t>(j)] > 0 ? "+" : "")
                                           << L[static_cast<std::size_t>(j)] << "*w" << j + 1 << " ";
                                if (c.tone >= 0) os << (c.sign > 0 ? "= +" : "= -") << "tone " << c.tone + 1 << " ";
                                else os << "= 0 ";
                                os << "(mismatch " << c.frequency + leg_freq << " rad/s)";
                                throw commensurate_error(os.str());
                            }
                            continue;
                        }
                        const int cls = detail::degeneracy_class(legs, n);
                        const cd base = B / 16.0 * gprod * c.factor * leg_phase;
                        if (base == cd(0.0)) continue;
                        detail::NormalOrderer no{n, {}};
                        std::vector<int> word = legs;
                        do {
                            no.run(word, base);
                        } while (std::next_permutation(word.begin(), word.end()));
                        for (auto& [key, v] : no.acc)
                            merged[{cls, c.tone, c.sign, std::get<0>(key), std::get<1>(key)}] += v;
                    }
                }
    for (auto& [key, v] : merged) {
        RwaTerm t;
        t.degeneracy_class = std::get<0>(key);
        t.tone = std::get<1>(key);
        t.tone_sign = std::get<2>(key);
        t.creators = std::get<3>(key);
        t.annihilators = std::get<4>(key);
        t.coefficient = v;
        t.normal_ordering = t.creators.size() + t.annihilators.size() < 4;
        cat.terms.push_back(std::move(t));
    }
    return cat;
}

// Unmodulated cavity drive, LOs at the operating frequencies.
inline RwaTermCatalog build_rwa_catalog(const OptomechanicalParams& p, const CatalogOptions& opt = {}) {
    p.validate();
    ToneSchedule s;
    for (int j = 0; j < p.n_modes(); ++j) s.lo.push_back({j, p.omega[static_cast<std::size_t>(j)], 0.0});
    return build_rwa_catalog(p, s, opt);
}

// ---- time-domain simulation ----

enum class SimulationMode { fullband, envelope };

inline const char* to_string(SimulationMode m) { return m == SimulationMode::fullband ? "fullband" : "envelope"; }

// Constant coherent drive in the LO frame: da_j/dt += force_j.
struct Drive {
    CVec force;
};

struct SimulationOptions {
    CVec initial;                    // a_j(0); empty means zero
    bool nonlinear = true;
    double step = 0.0;               // 0 selects automatically
    double steps_per_period = 50.0;  // fullband: per period of the fastest frequency
    double envelope_step = 0.02;     // envelope: step times the generator norm
    int record_every = 1;
    double blowup_bound = 1e12;
    CatalogOptions catalog;
};

struct SimulationResult {
    SimulationMode mode = SimulationMode::envelope;
    std::vector<double> t;
    std::vector<CVec> envelope;           // a_j in the LO frame
    std::vector<RVec> raw;                // fullband (z, z') per record; empty for envelope runs
    std::vector<double> frame_frequency;  // LO frequencies, rad/s
    num::IvpStatus status = num::IvpStatus::completed;
    double step = 0.0;
};

inline SimulationResult simulate(const ChainSpec& spec, const OptomechanicalParams& p, const Drive& drive,
                                 double t_end, SimulationMode mode, const SimulationOptions& opt = {}) {
    spec.validate();
    p.validate();
    const int n = spec.n_sites;
    if (p.n_modes() != n) throw std::invalid_argument("simulate: hardware mode count must equal chain length");
    if (!(t_end > 0)) throw std::invalid_argument("simulate: t_end must be positive");
    const CVec a0 = opt.initial.size() == 0 ? CVec(CVec::Zero(n)) : opt.initial;
    const CVec d = drive.force.size() == 0 ? CVec(CVec::Zero(n)) : drive.force;
    if (a0.size() != n || d.size() != n) throw std::invalid_argument("simulate: initial/drive size mismatch");

    const ToneSchedule sch = compile_tones(spec, p);
    num::IvpOptions io;
    io.blowup_bound = opt.blowup_bound;
    io.record_every = opt.record_every;

    SimulationResult res;
    res.mode = mode;
    for (const auto& o : sch.lo) res.frame_frequency.push_back(o.frequency);

    if (mode == SimulationMode::envelope) {
        const CMat K = mode_generator(spec);
        const CMat Kaa = K.topLeftCorner(n, n), Kab = K.topRightCorner(n, n);
        RwaTermCatalog cat;
        if (opt.nonlinear) cat = build_rwa_catalog(p, sch, opt.catalog);
        auto f = [&](double, const CVec& a) -> CVec {
            CVec r = Kaa * a + Kab * a.conjugate() + d;
            if (opt.nonlinear) r += cat.force(a);
            return r;
        };
        const double h = opt.step > 0 ? opt.step : opt.envelope_step / std::max(num::inf_norm(K), 1e-300);
        auto tr = num::integrate_ivp(f, a0, 0.0, t_end, h, io);
        res.t = std::move(tr.t);
        res.envelope = std::move(tr.y);
        res.status = tr.status;
        res.step = tr.step;
        return res;
    }

    // fullband
    const double B = opt.nonlinear ? cubic_scale(p) : 0.0;
    std::vector<double> w(p.omega), nu(res.frame_frequency), phi, g(spec.damping), g0(p.g0);
    for (const auto& o : sch.lo) phi.push_back(o.phase);
    RMat cross = RMat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                const double si = p.spring_shift(i), sj = p.spring_shift(j);
                cross(i, j) = 2.0 * w[static_cast<std::size_t>(i)] * (si > 0 ? 1.0 : -1.0) * std::sqrt(si * sj);
            }
    double fastest = *std::max_element(w.begin(), w.end());
    for (double v : nu) fastest = std::max(fastest, v);
    for (const auto& t : sch.tones) fastest = std::max(fastest, t.frequency);

    auto f = [&](double t, const RVec& y) -> RVec {
        RVec r(2 * n);
        double mu = 0.0;
        for (const auto& tn : sch.tones) mu += tn.depth * std::cos(tn.frequency * t + tn.phase);
        double S = 0.0;
        for (int j = 0; j < n; ++j) S += g0[static_cast<std::size_t>(j)] * y(j);
        const RVec coupled = cross * y.head(n);
        for (int i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            const double z = y(i), v = y(n + i);
            double acc = -w[u] * w[u] * z - g[u] * v - mu * coupled(i);
            acc -= w[u] * B * (1.0 + mu) * g0[u] * S * S * S;
            if (d(i) != cd(0.0)) {
                // da/dt = d  <=>  force 2 Re(-i sqrt2 nu d e^{-i(nu t + phi)})
                const cd e = std::exp(cd(0, -(nu[u] * t + phi[u])));
                acc += 2.0 * (cd(0, -std::sqrt(2.0) * nu[u]) * d(i) * e).real();
            }
            r(i) = v;
            r(n + i) = acc;
        }
        return r;
    };
    RVec y0(2 * n);
    for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const cd a = a0(i) * std::exp(cd(0, -phi[u]));
        y0(i) = std::sqrt(2.0) * a.real();
        y0(n + i) = std::sqrt(2.0) * nu[u] * a.imag();
    }
    const double h = opt.step > 0 ? opt.step : 2.0 * std::numbers::pi / fastest / opt.steps_per_period;
    auto tr = num::integrate_ivp(f, y0, 0.0, t_end, h, io);
    res.t = std::move(tr.t);
    res.raw = std::move(tr.y);
    res.status = tr.status;
    res.step = tr.step;
    for (std::size_t k = 0; k < res.t.size(); ++k) {
        CVec a(n);
        for (int i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            const cd q(res.raw[k](i), res.raw[k](n + i) / nu[u]);
            a(i) = q * std::exp(cd(0, nu[u] * res.t[k] + phi[u])) / std::sqrt(2.0);
        }
        res.envelope.push_back(a);
    }
    return res;
}

// ---- saturation metrics ----

struct SaturationMetrics {
    double amplitude = 0.0;         // RMS of |a| (all modes) over the settled window
    std::vector<double> mode_amplitude;
    int dominant_mode = 0;
    double frequency = std::numeric_limits<double>::quiet_NaN();         // absolute, rad/s
    double frequency_offset = std::numeric_limits<double>::quiet_NaN();  // relative to the LO
    double settling_time = 0.0;
    double drift = 0.0;
};

namespace detail {

// |sum_k hann_k x_k e^{i w (t_k - t_0)}| on a uniform grid; x already carries the window.
inline double spectral_magnitude(double dt, const std::vector<cd>& xw, double w) {
    const cd step = std::exp(cd(0, w * dt));
    cd ph = 1.0, acc = 0.0;
    for (std::size_t k = 0; k < xw.size(); ++k) {
        acc += xw[k] * ph;
        ph *= step;
        if ((k & 255) == 255) ph = std::exp(cd(0, w * dt * static_cast<double>(k + 1)));
    }
    return std::abs(acc);
}

// Peak of the windowed discrete spectrum, refined between neighbouring bins.
inline double spectral_peak(const std::vector<double>& t, const std::vector<cd>& x) {
    const double span = t.back() - t.front();
    const double dt = span / static_cast<double>(t.size() - 1);
    const std::size_t n = x.size();
    std::vector<cd> xw(n);
    for (std::size_t k = 0; k < n; ++k)
        xw[k] = x[k] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / (n - 1)));
    auto mag = [&](double w) { return spectral_magnitude(dt, xw, w); };
    const double nyq = std::numbers::pi / dt;
    const double bin = 2.0 * std::numbers::pi / span / 4.0;
    double best_w = 0.0, best = -1.0;
    for (double w = -nyq; w <= nyq; w += bin) {
        const double m = mag(w);
        if (m > best) {
            best = m;
            best_w = w;
        }
    }
    double lo = best_w - bin, hi = best_w + bin;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), e = lo + gr * (hi - lo);
    double fc = mag(c), fe = mag(e);
    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, std::abs(best_w)); ++it) {
        if (fc > fe) {
            hi = e;
            e = c;
            fe = fc;
            c = hi - gr * (hi - lo);
            fc = mag(c);
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + gr * (hi - lo);
            fe = mag(e);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

inline SaturationMetrics saturation_metrics(const SimulationResult& r, double window_fraction = 0.2,
                                            double drift_tol = 0.01, std::size_t max_spectral_samples = 4096) {
    if (r.status != num::IvpStatus::completed) throw not_settled_error("trajectory diverged");
    const std::size_t total = r.t.size();
    const auto win = static_cast<std::size_t>(std::floor(window_fraction * static_cast<double>(total)));
    if (win < 8) throw std::invalid_argument("saturation_metrics: trajectory too short");
    const std::size_t start = total - win;
    const int n = static_cast<int>(r.envelope.front().size());

    std::vector<double> amp(total);
    double peak = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
        amp[k] = r.envelope[k].norm();
        peak = std::max(peak, amp[k]);
    }
    auto rms = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t k = a; k < b; ++k) s += amp[k] * amp[k];
        return std::sqrt(s / static_cast<double>(b - a));
    };
    SaturationMetrics m;
    m.amplitude = rms(start, total);
    const double floor = 1e-6 * peak;
    const std::size_t mid = start + win / 2;
    m.drift = m.amplitude <= floor ? 0.0 : std::abs(rms(mid, total) - rms(start, mid)) / m.amplitude;
    if (m.drift > drift_tol) {
        std::ostringstream os;
        os << "not settled: amplitude drift " << m.drift << " over the final window exceeds " << drift_tol;
        throw not_settled_error(os.str());
    }
    const double band = std::max(0.05 * m.amplitude, floor);
    m.settling_time = r.t.front();
    for (std::size_t k = total; k-- > 0;)
        if (std::abs(amp[k] - m.amplitude) > band) {
            m.settling_time = r.t[std::min(k + 1, total - 1)];
            break;
        }

    m.mode_amplitude.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = start; k < total; ++k) s += std::norm(r.envelope[k](j));
        m.mode_amplitude[static_cast<std::size_t>(j)] = std::sqrt(s / static_cast<double>(win));
    }
    m.dominant_mode = static_cast<int>(std::max_element(m.mode_amplitude.begin(), m.mode_amplitude.end()) -
                                       m.mode_amplitude.begin());
    if (m.amplitude > floor) {
        const std::size_t stride = std::max<std::size_t>(1, win / max_spectral_samples);
        std::vector<double> ts;
        std::vector<cd> xs;
        for (std::size_t k = start; k < total; k += stride) {
            ts.push_back(r.t[k]);
            xs.push_back(r.envelope[k](m.dominant_mode));
        }
        m.frequency_offset = detail::spectral_peak(ts, xs);
        m.frequency = r.frame_frequency[static_cast<std::size_t>(m.dominant_mode)] + m.frequency_offset;
    }
    return m;
}

} // namespace bkc
