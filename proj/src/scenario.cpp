#include "bkc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "bkc/io.hpp"
#include "bkc/nonlinear.hpp"
#include "bkc/response.hpp"
#include "bkc/sensing.hpp"
#include "bkc/spectra.hpp"
#include "bkc/thermal.hpp"
#include "bkc/tones.hpp"

#ifndef BKC_VERSION
#define BKC_VERSION "unknown"
#endif

namespace bkc::cli {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string join_issues(const std::vector<std::string>& list) {
    std::string s = "config schema error";
    for (const auto& i : list) s += "\n  " + i;
    return s;
}

struct Grid {
    double min = 0.0, max = 0.0;
    int count = 1;

    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            v[static_cast<std::size_t>(i)] = count == 1 ? min : min + (max - min) * i / (count - 1);
        return v;
    }
};

// Walks one JSON object, records the resolved value of every key it reads and
// collects diagnostics instead of stopping at the first problem.
class Reader {
public:
    // Resolved values go to root[ptr]; a pointer stays valid while siblings are inserted.
    Reader(const json* node, std::string path, std::vector<std::string>& issues, json& root, json::json_pointer ptr)
        : node_(node), path_(std::move(path)), issues_(issues), root_(root), ptr_(std::move(ptr)) {
        if (node_ && !node_->is_object()) {
            issue("", "expected an object");
            node_ = nullptr;
        }
        if (!out().is_object()) out() = json::object();
    }

    double real(const std::string& key, std::optional<double> def, double min = -HUGE_VAL, bool open_min = false) {
        const json* v = get(key);
        double x = def.value_or(0.0);
        if (!v) {
            if (!def) issue(key, "required field missing");
        } else if (!v->is_number()) {
            issue(key, "expected a number");
        } else {
            x = v->get<double>();
            if (!std::isfinite(x)) issue(key, "must be finite");
            else if (open_min ? !(x > min) : !(x >= min))
                issue(key, std::string("must be ") + (open_min ? "> " : ">= ") + io::format_number(min));
        }
        out()[key] = x;
        return x;
    }

    long long integer(const std::string& key, std::optional<long long> def, long long min) {
        const json* v = get(key);
        long long x = def.value_or(0);
        if (!v) {
            if (!def) issue(key, "required field missing");
        } else if (!v->is_number_integer()) {
            issue(key, "expected an integer");
        } else {
            x = v->get<long long>();
            if (x < min) issue(key, "must be >= " + std::to_string(min));
        }
        out()[key] = x;
        return x;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
        const json* v = get(key);
        std::uint64_t x = def;
        if (v) {
            if (v->is_number_unsigned()) x = v->get<std::uint64_t>();
            else issue(key, "expected a non-negative integer");
        }
        out()[key] = x;
        return x;
    }

    bool boolean(const std::string& key, bool def) {
        const json* v = get(key);
        bool x = def;
        if (v) {
            if (v->is_boolean()) x = v->get<bool>();
            else issue(key, "expected true or false");
        }
        out()[key] = x;
        return x;
    }

    std::string choice(const std::string& key, std::optional<std::string> def, const std::vector<std::string>& allowed) {
        const json* v = get(key);
        std::string x = def.value_or(allowed.front());
        if (!v) {
            if (!def) issue(key, "required field missing");
        } else if (!v->is_string() || std::find(allowed.begin(), allowed.end(), v->get<std::string>()) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            issue(key, "expected one of " + list);
        } else {
            x = v->get<std::string>();
        }
        out()[key] = x;
        return x;
    }

    // A number (broadcast) or an array with n entries; n = 0 skips the length check.
    std::vector<double> per_site(const std::string& key, std::optional<double> def, std::size_t n, double min) {
        const json* v = get(key);
        std::vector<double> x(n, def.value_or(0.0));
        if (!v) {
            if (!def) issue(key, "required field missing");
            out()[key] = def.value_or(0.0);
            return x;
        }
        if (v->is_number()) {
            const double d = v->get<double>();
            if (!std::isfinite(d) || d < min) issue(key, "must be finite and >= " + io::format_number(min));
            x.assign(n, d);
            out()[key] = d;
            return x;
        }
        if (!v->is_array()) {
            issue(key, "expected a number or an array of numbers");
            out()[key] = def.value_or(0.0);
            return x;
        }
        if (n != 0 && v->size() != n) issue(key, "expected " + std::to_string(n) + " entries, got " + std::to_string(v->size()));
        std::vector<double> got;
        for (const auto& e : *v) {
            if (!e.is_number() || !std::isfinite(e.get<double>()) || e.get<double>() < min) {
                issue(key, "entries must be finite numbers >= " + io::format_number(min));
                got.clear();
                break;
            }
            got.push_back(e.get<double>());
        }
        out()[key] = got;
        if (n == 0 || got.size() == n) return got;
        return x;
    }

    Grid grid(const std::string& key, Grid def) {
        Grid g = def;
        Reader r = child(key);
        g.min = r.real("min", def.min);
        g.max = r.real("max", def.max);
        g.count = static_cast<int>(r.integer("count", def.count, 1));
        r.finish();
        if (g.count > 1 && !(g.max > g.min)) issue(key, "max must exceed min when count > 1");
        return g;
    }

    Reader child(const std::string& key) { return Reader(get(key), full(key), issues_, root_, ptr_ / key); }

    bool has(const std::string& key) const { return node_ && node_->contains(key); }
    void mark(const std::string& key) { used_.push_back(key); }

    void finish() {
        if (!node_) return;
        for (auto it = node_->begin(); it != node_->end(); ++it)
            if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) issue(it.key(), "unknown key");
    }

    // End of a scenario block: every schema problem found so far is reported at once.
    void close() {
        finish();
        if (!issues_.empty()) throw schema_error(issues_);
    }

    void issue(const std::string& key, const std::string& msg) {
        const std::string where = full(key);
        issues_.push_back((where.empty() ? "config" : where) + ": " + msg);
    }

private:
    json& out() { return root_[ptr_]; }

    const json* get(const std::string& key) {
        used_.push_back(key);
        if (!node_) return nullptr;
        auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }
    std::string full(const std::string& key) const {
        if (key.empty()) return path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* node_;
    std::string path_;
    std::vector<std::string>& issues_;
    json& root_;
    json::json_pointer ptr_;
    std::vector<std::string> used_;
};

ChainSpec read_chain(Reader r) {
    ChainSpec s;
    s.n_sites = static_cast<int>(r.integer("n_sites", std::nullopt, 1));
    const auto n = static_cast<std::size_t>(std::max(s.n_sites, 1));
    s.boundary = boundary_from_string(r.choice("boundary", std::string("open"), {"open", "periodic"}));
    const double j = r.real("hopping_hz", std::nullopt, 0.0);
    const double l = r.real("squeezing_hz", std::nullopt, 0.0);
    const double phi = r.real("phase_rad", std::numbers::pi / 2);
    const double phi_l = r.real("squeezing_phase_rad", phi);
    s.hopping = two_pi * j * unit_phasor(phi);
    s.squeezing = two_pi * l * unit_phasor(phi_l);
    for (double g : r.per_site("damping_hz", std::nullopt, n, 0.0)) s.damping.push_back(two_pi * g);
    for (double e : r.per_site("detuning_hz", 0.0, n, -HUGE_VAL)) s.detuning.push_back(two_pi * e);
    r.finish();
    return s;
}

struct HardwareConfig {
    std::vector<double> mode_hz, shift_hz;
    double kappa_hz = 0, g0_ref_hz = 0;

    OptomechanicalParams params() const {
        std::vector<double> w, d;
        for (double f : mode_hz) w.push_back(two_pi * f);
        for (double f : shift_hz) d.push_back(two_pi * f);
        return OptomechanicalParams::from_spring_shifts(w, d, two_pi * kappa_hz, two_pi * g0_ref_hz);
    }
};

HardwareConfig read_hardware(Reader r, std::size_t n) {
    HardwareConfig h;
    h.mode_hz = r.per_site("mode_frequencies_hz", std::nullopt, n, 0.0);
    h.shift_hz = r.per_site("spring_shift_hz", std::nullopt, n, -HUGE_VAL);
    h.kappa_hz = r.real("kappa_hz", std::nullopt, 0.0, true);
    h.g0_ref_hz = r.real("g0_ref_hz", std::nullopt, 0.0, true);
    r.finish();
    return h;
}

Dataset csv_dataset(std::string file, const io::Table& t) {
    return {std::move(file), "csv", t.rows.size(), io::to_csv(t)};
}

std::string regime_label(const std::optional<Regime>& r) { return r ? to_string(*r) : "boundary"; }

// ---- scenarios ----

void run_respond(Reader& block, const ChainSpec& s, ScenarioResult& res) {
    const double f = block.real("frequency_hz", 0.0);
    block.close();
    s.validate();
    auto st = stability_report(s);
    if (!st.stable) res.warnings.push_back("chain is dynamically unstable; the susceptibility has no steady-state meaning");
    auto chi = susceptibility(s, two_pi * f);
    const auto labels = io::quadrature_labels(s.n_sites);
    io::Table t = io::complex_matrix_table(chi.chi, labels, labels);
    t.columns[0] = "response";
    res.datasets.push_back(csv_dataset("susceptibility.csv", t));
    io::Table a = io::real_matrix_table(chi.chi.cwiseAbs(), labels, labels);
    a.columns[0] = "response";
    res.datasets.push_back(csv_dataset("susceptibility_abs.csv", a));
    io::Table a2 = io::real_matrix_table(chi.chi.cwiseAbs2(), labels, labels);
    a2.columns[0] = "response";
    res.datasets.push_back(csv_dataset("susceptibility_abs2.csv", a2));
    auto gains = channel_gains(chi.chi);
    io::Table sv;
    sv.columns = {"index", "singular_value_s"};
    for (Eigen::Index i = 0; i < gains.sigma.size(); ++i)
        sv.add_numbers({static_cast<double>(i + 1), gains.sigma(i)});
    res.datasets.push_back(csv_dataset("singular_values.csv", sv));
    res.summary["stable"] = st.stable;
    res.summary["growth_rate_hz"] = st.growth_rate / two_pi;
    res.summary["end_to_end_gain"] = std::abs(chi.x_to_x(0, s.n_sites - 1));
    res.summary["sigma2_over_sigma3"] = gains.ratio_23;
}

void run_spectrum(Reader& block, const ChainSpec& s, ScenarioResult& res) {
    const int n_k = static_cast<int>(block.integer("n_k", 512, 64));
    block.close();
    s.validate();
    RMat M = build_dynamical_matrix(s);
    CVec ev = num::eigenvalues(M);
    io::Table e;
    e.columns = {"index", "rate_re_hz", "rate_im_hz"};
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        e.add_numbers({static_cast<double>(i + 1), ev(i).real() / two_pi, ev(i).imag() / two_pi});
    res.datasets.push_back(csv_dataset("eigenvalues.csv", e));
    res.summary["growth_rate_hz"] = ev(0).real() / two_pi;

    const bool uniform = !s.detuned() && s.uniform_damping() && s.has_common_phase();
    if (!uniform) {
        res.warnings.push_back("chain is not translation invariant; Bloch bands and winding numbers skipped");
        return;
    }
    auto bands = bloch_bands(s, n_k);
    io::Table b;
    b.columns = {"k", "plus_re_hz", "plus_im_hz", "minus_re_hz", "minus_im_hz"};
    for (std::size_t i = 0; i < bands.k.size(); ++i)
        b.add_numbers({bands.k[i], bands.plus[i].real() / two_pi, bands.plus[i].imag() / two_pi,
                       bands.minus[i].real() / two_pi, bands.minus[i].imag() / two_pi});
    res.datasets.push_back(csv_dataset("bands.csv", b));
    try {
        auto c = classify_phase(s);
        res.summary["label"] = to_string(c.label);
        res.summary["nu_plus"] = c.nu_plus;
        res.summary["nu_minus"] = c.nu_minus;
    } catch (const phase_boundary_error& ex) {
        res.summary["label"] = "boundary";
        res.warnings.push_back(ex.what());
    }
}

void run_phase_diagram(Reader& block, const ChainSpec& s, const RunOptions& opt, ScenarioResult& res) {
    const Grid phases = block.grid("phase_rad", {0.0, std::numbers::pi, 101});
    const Grid ratios = block.grid("ratio", {0.0, 2.0, 101});
    const int n_k = static_cast<int>(block.integer("n_k", 1024, 64));
    block.close();
    s.validate();
    auto map = end_to_end_gain_map(s, phases.values(), ratios.values(), opt.threads, n_k);
    io::Table t;
    t.columns = {"phase_rad", "ratio", "gain", "label", "growth_rate_hz"};
    std::map<std::string, int> counts;
    for (const auto& p : map.points) {
        const std::string label = regime_label(p.label);
        ++counts[label];
        t.add_row({io::format_number(p.phase), io::format_number(p.ratio),
                   io::format_number(p.gain.value_or(std::numeric_limits<double>::quiet_NaN())), label,
                   io::format_number(p.growth_rate / two_pi)});
    }
    res.datasets.push_back(csv_dataset("phase_diagram.csv", t));
    res.summary["points"] = map.points.size();
    json c = json::object();
    for (const auto& [k, v] : counts) c[k] = v;
    res.summary["label_counts"] = c;
}

void run_thermal(Reader& block, const ChainSpec& s, const RunOptions& opt, ScenarioResult& res) {
    const auto n = static_cast<std::size_t>(s.n_sites);
    const auto n_th = block.per_site("n_th", std::nullopt, n, 0.0);
    std::optional<Grid> grid;
    if (block.has("spectrum_hz")) grid = block.grid("spectrum_hz", {-1.0, 1.0, 201});
    else block.mark("spectrum_hz");
    block.close();
    s.validate();
    auto cov = steady_covariance(s, n_th);
    io::Table t;
    t.columns = {"site", "population", "classical_population"};
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        t.add_numbers({static_cast<double>(j + 1), cov.populations[j], cov.classical_populations[j]});
        total += cov.populations[j];
    }
    res.datasets.push_back(csv_dataset("populations.csv", t));
    res.summary["total_population"] = total;
    if (!grid) return;
    std::vector<double> w;
    for (double f : grid->values()) w.push_back(two_pi * f);
    auto sp = thermal_spectrum(s, n_th, w, opt.threads);
    io::Table p;
    p.columns = {"frequency_hz"};
    for (std::size_t j = 1; j <= n; ++j) p.columns.push_back("psd_site" + std::to_string(j) + "_per_rad_s");
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::vector<double> row{w[i] / two_pi};
        for (std::size_t j = 0; j < n; ++j) row.push_back(sp.psd[j][i]);
        p.add_numbers(row);
    }
    res.datasets.push_back(csv_dataset("psd.csv", p));
    res.summary["psd_convention"] =
        "linear response: S_j(w) = [chi D chi^H]_{x_j x_j}/2 + [chi D chi^H]_{p_j p_j}/2, integral over w = 2 pi (n_j + 1/2)";
}

void run_sense(Reader& block, const ChainSpec& s, ScenarioResult& res) {
    const double gamma_hz = !s.damping.empty() && s.uniform_damping() ? s.damping.front() / two_pi : 0.0;
    const Grid eps = block.grid("epsilon_hz", {-0.5 * gamma_hz, 0.5 * gamma_hz, 21});
    const int n_min = static_cast<int>(block.integer("n_min", s.n_sites, 1));
    const int n_max = static_cast<int>(block.integer("n_max", s.n_sites, 1));
    block.close();
    s.validate();
    if (n_max < n_min) throw std::invalid_argument("sense.n_max must be >= sense.n_min");
    io::Table t;
    t.columns = {"N", "epsilon_hz", "chi_re_s", "chi_im_s", "responsivity", "rank_one_re_s", "rank_one_im_s"};
    json per_n = json::array();
    for (int n = n_min; n <= n_max; ++n) {
        ChainSpec c = s;
        c.n_sites = n;
        c.damping.assign(static_cast<std::size_t>(n), s.gamma());
        c.detuning.assign(static_cast<std::size_t>(n), 0.0);
        const double r = responsivity(c);
        per_n.push_back({{"N", n}, {"responsivity", r}});
        for (double e : eps.values()) {
            auto pt = sensing_susceptibility(c, two_pi * e);
            t.add_numbers({static_cast<double>(n), e, pt.direct.real(), pt.direct.imag(), r, pt.rank_one.real(),
                           pt.rank_one.imag()});
        }
    }
    res.datasets.push_back(csv_dataset("sensing.csv", t));
    res.summary["responsivity"] = per_n;
    if (n_max > n_min) res.summary["log_responsivity_slope"] = scaling_sweep(s, n_min, n_max).log_slope;
}

void run_simulate(Reader& block, const ChainSpec& s, std::uint64_t seed, ScenarioResult& res) {
    const auto n = static_cast<std::size_t>(s.n_sites);
    const HardwareConfig hwc = read_hardware(block.child("hardware"), n);
    const double t_end = block.real("t_end_s", std::nullopt, 0.0, true);
    const std::string mode = block.choice("mode", std::string("envelope"), {"envelope", "fullband"});
    SimulationOptions opt;
    opt.nonlinear = block.boolean("nonlinear", true);
    const auto re = block.per_site("initial_re", 0.0, n, -HUGE_VAL);
    const auto im = block.per_site("initial_im", 0.0, n, -HUGE_VAL);
    const double noise = block.real("initial_noise", 0.0, 0.0);
    opt.record_every = static_cast<int>(block.integer("record_every", 100, 1));
    opt.step = block.real("step_s", 0.0, 0.0);
    block.close();
    s.validate();

    const auto hw = hwc.params();
    for (const auto& w : hw.validity_warnings()) res.warnings.push_back(w);
    opt.initial = CVec(static_cast<Eigen::Index>(n));
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double dr = noise * normal(gen) / std::sqrt(2.0);
        const double di = noise * normal(gen) / std::sqrt(2.0);
        opt.initial(static_cast<Eigen::Index>(j)) = cd(re[j] + dr, im[j] + di);
    }
    auto r = simulate(s, hw, {}, t_end, mode == "fullband" ? SimulationMode::fullband : SimulationMode::envelope, opt);
    io::Table t;
    t.columns = {"t_s"};
    for (std::size_t j = 1; j <= n; ++j) {
        t.columns.push_back("a" + std::to_string(j) + "_re");
        t.columns.push_back("a" + std::to_string(j) + "_im");
    }
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        std::vector<double> row{r.t[k]};
        for (Eigen::Index j = 0; j < r.envelope[k].size(); ++j) {
            row.push_back(r.envelope[k](j).real());
            row.push_back(r.envelope[k](j).imag());
        }
        t.add_numbers(row);
    }
    res.datasets.push_back(csv_dataset("trajectory.csv", t));
    res.summary["status"] = r.status == num::IvpStatus::completed ? "completed" : "diverged";
    res.summary["step_s"] = r.step;
    if (r.status != num::IvpStatus::completed) return;
    try {
        auto m = saturation_metrics(r);
        res.summary["settled"] = true;
        res.summary["settled_amplitude"] = m.amplitude;
        res.summary["dominant_mode"] = m.dominant_mode + 1;
        res.summary["frequency_offset_hz"] = m.frequency_offset / two_pi;
        res.summary["settling_time_s"] = m.settling_time;
        res.summary["drift"] = m.drift;
    } catch (const std::exception& ex) {
        // the metrics are a summary only; the trajectory itself is still valid
        res.summary["settled"] = false;
        res.warnings.push_back(ex.what());
    }
}

void run_tones(Reader& block, const ChainSpec& s, ScenarioResult& res) {
    const auto n = static_cast<std::size_t>(s.n_sites);
    const HardwareConfig hwc = read_hardware(block.child("hardware"), n);
    const int capacity = static_cast<int>(block.integer("capacity", 8, 1));
    ToneOptions topt;
    if (block.has("lo_phases_rad")) topt.lo_phases = block.per_site("lo_phases_rad", 0.0, n, -HUGE_VAL);
    else block.mark("lo_phases_rad");
    block.close();
    s.validate();
    const auto hw = hwc.params();
    for (const auto& w : hw.validity_warnings()) res.warnings.push_back(w);
    auto sch = compile_tones(s, hw, topt);
    const std::string table = format_schedule(sch);
    res.datasets.push_back({"tones.txt", "txt", sch.tones.size(), table});
    auto plan = plan_oscillators(s.n_sites, static_cast<int>(sch.tones.size()), capacity);
    std::ostringstream os;
    os << "# index kind item latency_s\n";
    std::size_t rows = 0;
    for (const auto& sl : plan.slots) {
        os << sl.index << ' ' << (sl.is_lo ? "LO" : "tone") << ' ' << sl.item + 1 << ' '
           << io::format_number(plan.latency_seconds(sl.index)) << '\n';
        ++rows;
    }
    for (const auto& e : plan.external) {
        os << "# tone " << e.tone + 1 << " on external generator " << e.generator << '\n';
        for (const auto& line : e.script) os << "#   " << line << '\n';
    }
    if (!plan.restore_script.empty()) {
        os << "# restore\n";
        for (const auto& line : plan.restore_script) os << "#   " << line << '\n';
    }
    res.datasets.push_back({"oscillator_plan.txt", "txt", rows, os.str()});
    res.summary["tones"] = sch.tones.size();
    res.summary["external_tones"] = plan.external.size();
    res.summary["transfer_oscillator"] = plan.transfer_oscillator;
}

} // namespace

schema_error::schema_error(std::vector<std::string> list)
    : std::invalid_argument(join_issues(list)), issues(std::move(list)) {}

const std::vector<ScenarioKind>& all_scenario_kinds() {
    static const std::vector<ScenarioKind> k = {ScenarioKind::respond, ScenarioKind::spectrum,
                                                ScenarioKind::phase_diagram, ScenarioKind::thermal,
                                                ScenarioKind::sense, ScenarioKind::simulate, ScenarioKind::tones};
    return k;
}

const char* to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::respond: return "respond";
    case ScenarioKind::spectrum: return "spectrum";
    case ScenarioKind::phase_diagram: return "phase-diagram";
    case ScenarioKind::thermal: return "thermal";
    case ScenarioKind::sense: return "sense";
    case ScenarioKind::simulate: return "simulate";
    case ScenarioKind::tones: return "tones";
    }
    return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
    for (auto k : all_scenario_kinds())
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown scenario kind '" + s + "'");
}

json parse_config(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw schema_error({std::string("config: ") + e.what()});
    }
}

ChainSpec chain_from_json(const json& j) {
    std::vector<std::string> issues;
    json out = json::object();
    ChainSpec s = read_chain(Reader(&j, "chain", issues, out, json::json_pointer()));
    if (!issues.empty()) throw schema_error(issues);
    s.validate();
    return s;
}

json chain_to_json(const ChainSpec& s) {
    json j;
    j["n_sites"] = s.n_sites;
    j["boundary"] = to_string(s.boundary);
    j["hopping_hz"] = std::abs(s.hopping) / two_pi;
    j["squeezing_hz"] = std::abs(s.squeezing) / two_pi;
    j["phase_rad"] = std::arg(s.hopping);
    j["squeezing_phase_rad"] = std::arg(s.squeezing);
    json g = json::array(), e = json::array();
    for (double v : s.damping) g.push_back(v / two_pi);
    for (double v : s.detuning) e.push_back(v / two_pi);
    j["damping_hz"] = g;
    j["detuning_hz"] = e;
    return j;
}

ScenarioResult run_scenario(ScenarioKind kind, const json& config, const RunOptions& opt) {
    ScenarioResult res;
    res.kind = kind;
    std::vector<std::string> issues;
    if (!config.is_object()) throw schema_error({"config: expected a JSON object"});
    res.resolved = json::object();
    Reader top(&config, "", issues, res.resolved, json::json_pointer());
    const std::string name = to_string(kind);
    if (config.contains("kind")) {
        if (!config["kind"].is_string() || config["kind"].get<std::string>() != name)
            top.issue("kind", "does not match the requested scenario '" + name + "'");
    }
    top.mark("kind");
    res.resolved["kind"] = name;
    res.seed = top.unsigned_integer("seed", 0);
    if (opt.seed_given) res.seed = opt.seed;
    res.resolved["seed"] = res.seed;
    ChainSpec s = read_chain(top.child("chain"));
    Reader block = top.child(name);

    top.finish();
    switch (kind) {
    case ScenarioKind::respond: run_respond(block, s, res); break;
    case ScenarioKind::spectrum: run_spectrum(block, s, res); break;
    case ScenarioKind::phase_diagram: run_phase_diagram(block, s, opt, res); break;
    case ScenarioKind::thermal: run_thermal(block, s, opt, res); break;
    case ScenarioKind::sense: run_sense(block, s, res); break;
    case ScenarioKind::simulate: run_simulate(block, s, res.seed, res); break;
    case ScenarioKind::tones: run_tones(block, s, res); break;
    }
    return res;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

json manifest(const ScenarioResult& r) {
    json m;
    m["tool"] = "bkc_cli";
    m["version"] = BKC_VERSION;
    m["kind"] = to_string(r.kind);
    m["seed"] = r.seed;
    m["config"] = r.resolved;
    m["summary"] = r.summary.is_null() ? json::object() : r.summary;
    m["warnings"] = r.warnings;
    json d = json::array();
    for (const auto& ds : r.datasets)
        d.push_back({{"file", ds.file}, {"format", ds.format}, {"rows", ds.rows}, {"sha256", sha256_hex(ds.content)}});
    m["datasets"] = d;
    return m;
}

void write_outputs(const std::string& dir, const ScenarioResult& r) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    for (const auto& ds : r.datasets) io::write_file((base / ds.file).string(), ds.content);
    io::write_file((base / "manifest.json").string(), manifest(r).dump(2) + "\n");
}

} // namespace bkc::cli
