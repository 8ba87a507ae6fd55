#pragma once

// Modulation-tone compiler: chain couplings -> intensity-modulation tones referenced to the
// resonator local oscillators (LOs), plus oscillator-capacity planning for phase referencing.
//
// Frame convention: mode j is demodulated by an LO with instantaneous phase nu_j t + phi_j and
// envelope a_j, z_j = (a_j e^{-i(nu_j t + phi_j)} + c.c.)/sqrt2. A tone cos(w_m t + phi_m) labelled
// j -/+ k has rotating-frame phase dphi = phi_m - (phi_j -/+ phi_k).
// Beam-splitter labels put the higher-frequency mode first. In the chain Hamiltonian
// J a_t^dag a_s + lambda a_t^dag a_s^dag + h.c. (s = source, t = target) the realised couplings are
//   J = |J| e^{+i dphi} if nu_s > nu_t, |J| e^{-i dphi} otherwise;  lambda = |lambda| e^{-i dphi},
// times -1 when the spring shifts are negative (laser red of the cavity flank).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "bkc/chain_model.hpp"
#include "bkc/errors.hpp"
#include "bkc/optomech.hpp"

namespace bkc {

enum class ToneKind { beam_splitter, two_mode_squeezing };

inline const char* to_string(ToneKind k) { return k == ToneKind::beam_splitter ? "BS" : "TMS"; }

// Wrap to (-pi, pi].
inline double wrap_phase(double p) {
    const double tau = 2.0 * std::numbers::pi;
    double r = std::remainder(p, tau);
    if (r <= -std::numbers::pi) r += tau;
    return r;
}

struct LocalOscillator {
    int mode = 0;
    double frequency = 0.0;  // rad/s
    double phase = 0.0;      // phase offset phi_j
};

struct Tone {
    int j = 0, k = 0;  // label j -/+ k
    ToneKind kind = ToneKind::beam_splitter;
    double frequency = 0.0;       // rad/s
    double depth = 0.0;           // c_m in [0, 1]
    double rotating_phase = 0.0;  // dphi
    double phase = 0.0;           // absolute offset phi_m
    int source = 0, target = 0;   // link realised by the tone

    std::string label() const {
        std::ostringstream os;
        os << j + 1 << (kind == ToneKind::beam_splitter ? "-" : "+") << k + 1;
        return os.str();
    }
};

struct ToneSchedule {
    std::vector<LocalOscillator> lo;
    std::vector<Tone> tones;
};

struct ChainLink {
    int source = 0, target = 0;
    cd hopping{0.0, 0.0};
    cd squeezing{0.0, 0.0};
};

inline std::vector<ChainLink> chain_links(const ChainSpec& s) {
    s.validate();
    std::vector<ChainLink> out;
    for (int j = 0; j + 1 < s.n_sites; ++j) out.push_back({j, j + 1, s.hopping, s.squeezing});
    if (s.boundary == Boundary::periodic) out.push_back({s.n_sites - 1, 0, s.hopping, s.squeezing});
    return out;
}

// |J|, |lambda| = c sqrt(dw_j dw_k) / 2
inline double coupling_magnitude(double depth, double shift_j, double shift_k) {
    const double p = shift_j * shift_k;
    if (!(p > 0)) throw std::invalid_argument("spring shifts must be non-zero and of equal sign");
    return 0.5 * depth * std::sqrt(p);
}

inline double depth_for_coupling(double magnitude, double shift_j, double shift_k) {
    const double p = shift_j * shift_k;
    if (!(p > 0)) throw std::invalid_argument("spring shifts must be non-zero and of equal sign");
    return 2.0 * magnitude / std::sqrt(p);
}

inline const LocalOscillator& find_lo(const std::vector<LocalOscillator>& lo, int mode) {
    for (const auto& o : lo)
        if (o.mode == mode) return o;
    throw std::invalid_argument("no local oscillator for mode " + std::to_string(mode + 1));
}

inline double rotating_frame_phase(const Tone& t, const std::vector<LocalOscillator>& lo) {
    const double pj = find_lo(lo, t.j).phase, pk = find_lo(lo, t.k).phase;
    return wrap_phase(t.phase - (t.kind == ToneKind::beam_splitter ? pj - pk : pj + pk));
}

// Coupling (J for beam splitters, lambda for squeezing) realised on the tone's link.
inline cd coupling_from_modulation(const Tone& t, const std::vector<LocalOscillator>& lo,
                                   const OptomechanicalParams& hw) {
    const double mag = coupling_magnitude(t.depth, hw.spring_shift(t.source), hw.spring_shift(t.target));
    const double dphi = rotating_frame_phase(t, lo);
    double sign = -1.0;
    if (t.kind == ToneKind::beam_splitter && t.j == t.source) sign = 1.0;
    // the cross-spring force flips sign with the laser detuning
    const double spring = hw.spring_shift(t.source) > 0 ? 1.0 : -1.0;
    return spring * mag * unit_phasor(sign * dphi);
}

struct ToneOptions {
    std::vector<double> lo_phases;     // per mode; empty means zero
    double collision_tol = 1e-9;       // relative to the largest frequency
};

inline ToneSchedule compile_links(const std::vector<ChainLink>& links, const std::vector<double>& detuning,
                                  const OptomechanicalParams& hw, const ToneOptions& opt = {}) {
    hw.validate();
    const int n = hw.n_modes();
    if (static_cast<int>(detuning.size()) != n) throw std::invalid_argument("need one detuning per mode");
    if (!opt.lo_phases.empty() && static_cast<int>(opt.lo_phases.size()) != n)
        throw std::invalid_argument("need one LO phase per mode");
    ToneSchedule out;
    for (int j = 0; j < n; ++j) {
        // detuning eps_j is realised by moving the LO (and every tone referenced to it) to omega_j + eps_j
        const double nu = hw.omega[static_cast<std::size_t>(j)] + detuning[static_cast<std::size_t>(j)];
        if (!(nu > 0)) throw std::invalid_argument("detuned LO frequency must stay positive");
        out.lo.push_back({j, nu, opt.lo_phases.empty() ? 0.0 : opt.lo_phases[static_cast<std::size_t>(j)]});
    }
    for (const auto& l : links) {
        if (l.source < 0 || l.source >= n || l.target < 0 || l.target >= n || l.source == l.target)
            throw std::invalid_argument("link indices out of range");
        const auto& ls = out.lo[static_cast<std::size_t>(l.source)];
        const auto& lt = out.lo[static_cast<std::size_t>(l.target)];
        if (ls.frequency == lt.frequency) throw infeasible_error("linked modes must have distinct frequencies");
        const double ds = hw.spring_shift(l.source), dt = hw.spring_shift(l.target);
        const cd hop = ds > 0 ? l.hopping : -l.hopping, sq = ds > 0 ? l.squeezing : -l.squeezing;

        Tone bs;
        bs.kind = ToneKind::beam_splitter;
        bs.source = l.source;
        bs.target = l.target;
        const bool src_hi = ls.frequency > lt.frequency;
        bs.j = src_hi ? l.source : l.target;
        bs.k = src_hi ? l.target : l.source;
        bs.frequency = std::abs(ls.frequency - lt.frequency);
        bs.depth = depth_for_coupling(std::abs(l.hopping), ds, dt);
        bs.rotating_phase = hop == cd(0.0) ? 0.0 : wrap_phase((src_hi ? 1.0 : -1.0) * std::arg(hop));

        Tone tms;
        tms.kind = ToneKind::two_mode_squeezing;
        tms.source = l.source;
        tms.target = l.target;
        tms.j = std::min(l.source, l.target);
        tms.k = std::max(l.source, l.target);
        tms.frequency = ls.frequency + lt.frequency;
        tms.depth = depth_for_coupling(std::abs(l.squeezing), ds, dt);
        tms.rotating_phase = sq == cd(0.0) ? 0.0 : wrap_phase(-std::arg(sq));

        for (Tone* t : {&bs, &tms}) {
            if (t->depth > 1.0) {
                std::ostringstream os;
                os << "insufficient spring shift: tone " << t->label() << " needs depth " << t->depth << " > 1";
                throw infeasible_error(os.str());
            }
            const double pj = out.lo[static_cast<std::size_t>(t->j)].phase;
            const double pk = out.lo[static_cast<std::size_t>(t->k)].phase;
            t->phase = wrap_phase(t->rotating_phase + (t->kind == ToneKind::beam_splitter ? pj - pk : pj + pk));
            out.tones.push_back(*t);
        }
    }
    std::sort(out.tones.begin(), out.tones.end(), [](const Tone& a, const Tone& b) {
        return std::make_tuple(std::min(a.j, a.k), std::max(a.j, a.k), a.kind) <
               std::make_tuple(std::min(b.j, b.k), std::max(b.j, b.k), b.kind);
    });

    double scale = 0.0;
    for (const auto& o : out.lo) scale = std::max(scale, o.frequency);
    for (const auto& t : out.tones) scale = std::max(scale, t.frequency);
    const double tol = opt.collision_tol * scale;
    for (std::size_t a = 0; a < out.tones.size(); ++a) {
        for (std::size_t b = a + 1; b < out.tones.size(); ++b)
            if (std::abs(out.tones[a].frequency - out.tones[b].frequency) <= tol)
                throw infeasible_error("frequency collision between tones " + out.tones[a].label() + " and " +
                                       out.tones[b].label());
        for (const auto& o : out.lo)
            if (std::abs(out.tones[a].frequency - o.frequency) <= tol)
                throw infeasible_error("frequency collision between tone " + out.tones[a].label() + " and LO " +
                                       std::to_string(o.mode + 1));
    }
    return out;
}

inline ToneSchedule compile_tones(const ChainSpec& s, const OptomechanicalParams& hw, const ToneOptions& opt = {}) {
    s.validate();
    if (hw.n_modes() != s.n_sites) throw std::invalid_argument("hardware mode count must equal chain length");
    return compile_links(chain_links(s), s.detuning, hw, opt);
}

// One tone per row: pair (1-based label), kind, frequency in Hz, depth, absolute phase in rad.
inline std::string format_schedule(const ToneSchedule& s) {
    std::string out = "# pair kind frequency_hz depth phase_rad\n";
    char buf[160];
    for (const auto& t : s.tones) {
        std::snprintf(buf, sizeof buf, "%s %s %.17g %.17g %.17g\n", t.label().c_str(), to_string(t.kind),
                      t.frequency / (2.0 * std::numbers::pi), t.depth, t.phase);
        out += buf;
    }
    return out;
}

// ---- oscillator planning ----

struct OscillatorSlot {
    int index = 0;       // 1-based oscillator index
    bool is_lo = true;
    int item = 0;        // mode index for LOs, tone index otherwise
    double latency_cycles = 0.0;
};

struct ExternalTone {
    int tone = 0;        // tone index
    int generator = 0;   // external generator number, 1-based
    std::vector<std::string> script;
};

struct OscillatorPlan {
    int capacity = 8;
    int transfer_oscillator = 0;  // 0 when no transfer is needed
    double clock_hz = 1.8e9;
    int cycles_per_index = 16;
    std::vector<OscillatorSlot> slots;
    std::vector<ExternalTone> external;
    std::vector<std::string> restore_script;  // re-references the tone displaced from the transfer slot

    int internal_tones() const {
        int c = 0;
        for (const auto& s : slots) c += !s.is_lo;
        return c;
    }
    double latency_seconds(int index) const { return cycles_per_index * index / clock_hz; }
};

namespace detail {

inline std::vector<std::string> transfer_script(int osc, int tone, int generator) {
    const std::string o = std::to_string(osc), m = "tone " + std::to_string(tone + 1),
                      g = "generator " + std::to_string(generator);
    return {
        "set oscillator " + o + " frequency to " + m,
        "read instantaneous phases of oscillator " + o + " and the LOs of " + m,
        "compute rotating-frame phase of oscillator " + o,
        "shift oscillator " + o + " by minus that phase",
        "emit weak " + m + " from oscillator " + o + " to the monitor detector",
        "measure monitor phase alpha1 with oscillator " + o,
        "disable oscillator " + o + " output and emit weak " + m + " from " + g,
        "measure monitor phase alpha2 with oscillator " + o,
        "shift " + g + " by -(alpha2 - alpha1)",
        "shift " + g + " to the target rotating-frame phase of " + m,
    };
}

} // namespace detail

inline OscillatorPlan plan_oscillators(int n_modes, int n_tones, int capacity = 8) {
    if (n_modes < 0 || n_tones < 0 || capacity < 1) throw std::invalid_argument("plan_oscillators: bad counts");
    OscillatorPlan p;
    p.capacity = capacity;
    const bool overflow = n_modes + n_tones > capacity;
    if (overflow && n_modes > capacity - 1) {
        std::ostringstream os;
        os << "infeasible: " << n_modes << " LOs leave no transfer oscillator (capacity " << capacity << ")";
        throw infeasible_error(os.str());
    }
    if (!overflow && n_modes > capacity) throw infeasible_error("more LOs than oscillators");
    int idx = 1;
    auto slot = [&](bool lo, int item) {
        p.slots.push_back({idx, lo, item, static_cast<double>(p.cycles_per_index * idx)});
        ++idx;
    };
    for (int j = 0; j < n_modes; ++j) slot(true, j);
    const int internal = overflow ? capacity - n_modes : n_tones;
    for (int m = 0; m < internal; ++m) slot(false, m);
    if (overflow) {
        p.transfer_oscillator = capacity;
        for (int m = internal, g = 1; m < n_tones; ++m, ++g)
            p.external.push_back({m, g, detail::transfer_script(capacity, m, g)});
        const auto full = detail::transfer_script(capacity, internal - 1, 0);
        p.restore_script.assign(full.begin(), full.begin() + 4);
    }
    return p;
}

} // namespace bkc
