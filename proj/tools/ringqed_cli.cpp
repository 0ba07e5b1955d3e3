// ringqed: command-line front end for the atom-cavity-ring simulator.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringqed/ringqed.hpp"

namespace fs = std::filesystem;
using namespace ringqed;
using ringqed::io::RunConfig;

namespace {

// Flags shared by every subcommand. Values stay as text so the config parser
// does all validation in one place.
struct FlagSet {
    std::map<std::string, std::string> values;
    std::string config_path;
    std::string plot_kind;
};

const std::vector<std::pair<std::string, std::string>> kFlags{
    {"omega", "atom-cavity coupling (units of omega0)"},
    {"omega-over-g", "atom-cavity coupling as a multiple of g"},
    {"g", "cavity-ring coupling"},
    {"dw", "ring mode spacing"},
    {"n-modes", "N (even); the ring has N+1 modes"},
    {"t-max-tb", "horizon in bypass times"},
    {"dt-div", "time step is T_b / dt-div"},
    {"out", "output CSV path"},
    {"plot", "output SVG path"},
    {"threads", "worker threads for sweeps"},
};

void add_common(CLI::App* cmd, FlagSet& flags) {
    for (const auto& [name, help] : kFlags)
        cmd->add_option("--" + name, flags.values[name], help);
    cmd->add_option("--config", flags.config_path, "key = value config file");
}

io::Overrides collect(CLI::App* cmd, const FlagSet& flags) {
    io::Overrides out;
    for (const auto& [name, help] : kFlags)
        if (cmd->count("--" + name) > 0)
            out.emplace_back(name, flags.values.at(name));
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorKind::IoError, "cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunConfig load(CLI::App* cmd, const FlagSet& flags, io::RunKind kind, const std::string& preset = {}) {
    std::string text = preset;
    if (!flags.config_path.empty())
        text += "\n" + read_text(flags.config_path);
    RunConfig cfg = io::parse_config(text, collect(cmd, flags));
    cfg.kind = kind;
    return cfg;
}

SystemParams params_of(const RunConfig& cfg) { return validate_params(cfg.physical); }

double dt_of(const RunConfig& cfg) { return params_of(cfg).bypass_time() / cfg.dt_div; }

fs::path sibling(const std::string& path, const std::string& suffix, const std::string& ext) {
    fs::path p(path);
    fs::path out = p.parent_path() / (p.stem().string() + suffix);
    out += ext;
    return out;
}

void print_params(const SystemParams& p) {
    std::printf("omega0 = %g  Omega = %.6g (%.4g g)  g = %g  dw = %g  N = %d\n", p.omega0(), p.omega(),
                p.omega() / p.g(), p.g(), p.mode_spacing(), p.n_modes());
    std::printf("T_b = %.6f  gamma = %.6g  gamma' = %.6g  (gamma' T_b = %.4f)\n", p.bypass_time(), p.markov_gamma(),
                p.effective_decay(), p.effective_decay() * p.bypass_time());
}

void print_recurrence(const ObservableSeries& series, const RunConfig& cfg) {
    const double span = series.times.back() / series.bypass_time;
    if (span < 2.5 - 1e-9) {
        std::printf("recurrence: not classified (horizon %.3f T_b < 2.5 T_b)\n", span);
        return;
    }
    const auto cls = classify_recurrence(series, cfg.revival_single, cfg.revival_doubled);
    const auto rep = detect_revivals(series, cfg.revival_single);
    std::printf("recurrence: %s", to_string(cls));
    if (rep.poincare_time)
        std::printf("  (first revival at %.4f T_b)", *rep.poincare_time / series.bypass_time);
    std::printf("\n");
}

void print_phases(const ObservableSeries& series) {
    try {
        const auto avg = phase_averages(series);
        std::printf("<phase> over T_b = %.5f rad, over 2T_b = %.5f rad (masked %.2f%%)\n", avg.avg_over_Tb,
                    avg.avg_over_2Tb, 100.0 * avg.masked_fraction);
    } catch (const Error& e) {
        std::printf("<phase>: %s\n", e.what());
    }
}

void emit_series(const Trajectory& traj, const ObservableSeries& series, const RunConfig& cfg, io::PlotKind kind,
                 const ObservableSeries* reduced = nullptr) {
    if (!cfg.out.empty()) {
        io::write_trajectory_csv(traj, series, cfg.out);
        std::printf("wrote %s (%zu rows)\n", cfg.out.c_str(), series.size());
    }
    if (!cfg.plot.empty()) {
        io::render_plot(series, kind, cfg.plot, reduced);
        std::printf("wrote %s\n", cfg.plot.c_str());
    }
}

int run_simulate(const RunConfig& cfg, io::PlotKind kind) {
    const auto p = params_of(cfg);
    print_params(p);
    const auto traj = evolve_trajectory(p, cfg.t_max_tb * p.bypass_time(), dt_of(cfg));
    const auto series = compute_observables(traj, cfg.mask_eps);
    print_recurrence(series, cfg);
    print_phases(series);
    emit_series(traj, series, cfg, kind);
    return 0;
}

int run_markov(const RunConfig& cfg) {
    const auto p = params_of(cfg);
    print_params(p);
    const auto mp = markov_parameters(p);
    std::printf("reduced model: %s\n", mp.critical ? "critically damped" : mp.underdamped ? "underdamped" : "overdamped");
    const auto traj = markov_trajectory(p, cfg.t_max_tb * p.bypass_time(), dt_of(cfg));
    const auto series = compute_observables(traj, cfg.mask_eps);
    emit_series(traj, series, cfg, io::PlotKind::Populations);
    return 0;
}

// Full model with the reduced model overlaid; the reduced one goes to <out>_reduced.csv.
int run_compare(const RunConfig& cfg) {
    const auto p = params_of(cfg);
    print_params(p);
    const double t_max = cfg.t_max_tb * p.bypass_time();
    const auto full = evolve_trajectory(p, t_max, dt_of(cfg));
    const auto reduced = markov_trajectory(p, t_max, dt_of(cfg));
    const auto fs_ = compute_observables(full, cfg.mask_eps);
    const auto rs = compute_observables(reduced, cfg.mask_eps);
    double sup = 0.0;
    for (std::size_t i = 0; i < fs_.size(); ++i)
        if (fs_.times[i] <= 0.9 * p.bypass_time() * (1 + 1e-12))
            sup = std::max(sup, std::abs(fs_.pop_sigma[i] - rs.pop_sigma[i]));
    std::printf("sup |pop_sigma full - reduced| over [0, 0.9 T_b] = %.5f\n", sup);
    emit_series(full, fs_, cfg, io::PlotKind::Populations, &rs);
    if (!cfg.out.empty()) {
        const auto path = sibling(cfg.out, "_reduced", ".csv");
        io::write_trajectory_csv(reduced, rs, path);
        std::printf("wrote %s\n", path.string().c_str());
    }
    return 0;
}

int run_spectrum(const RunConfig& cfg) {
    const auto p = params_of(cfg);
    print_params(p);
    const auto spec = eigendecompose(build_hamiltonian(p));
    const double window = 5.0 * p.effective_decay();
    std::printf("atom weight within |f - omega0| <= 5 gamma' (%.4g): %.6f\n", window,
                weight_within(spec, p.omega0(), window));
    const auto points = mode_weight_distribution(spec);
    if (!cfg.out.empty()) {
        io::write_weight_csv(points, cfg.out);
        std::printf("wrote %s (%zu rows)\n", cfg.out.c_str(), points.size());
    }
    if (!cfg.plot.empty()) {
        io::render_plot(points, io::PlotKind::WeightSpectrum, cfg.plot);
        std::printf("wrote %s\n", cfg.plot.c_str());
    }
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    const auto p = params_of(cfg);
    print_params(p);
    SweepOptions opts;
    opts.dt_divisor = cfg.dt_div;
    opts.phase_floor = cfg.mask_eps;
    opts.revival_single = cfg.revival_single;
    opts.revival_doubled = cfg.revival_doubled;
    opts.band = cfg.phase_band;
    opts.threads = static_cast<unsigned>(cfg.threads);
    const auto omegas = log_spaced(cfg.sweep_min_over_g * p.g(), cfg.sweep_max_over_g * p.g(), cfg.sweep_points);
    const auto report = sweep_coupling(p, omegas, cfg.t_max_tb * p.bypass_time(), opts);

    std::printf("%10s %12s %12s %14s\n", "Omega/g", "<phi>_Tb", "<phi>_2Tb", "class");
    for (const auto& r : report.rows) {
        if (r.ok())
            std::printf("%10.4f %12.5f %12.5f %14s\n", r.omega_over_g, r.avg_phase_Tb, r.avg_phase_2Tb,
                        to_string(r.classification));
        else
            std::printf("%10.4f  failed: %s\n", r.omega_over_g, r.failure->c_str());
    }
    const auto cc = critical_coupling(p);
    std::printf("critical coupling g/sqrt(2) = %.7g\n", cc.omega);
    if (report.transition_estimate)
        std::printf("transition estimate = %.7g (%.4f g)\n", *report.transition_estimate,
                    *report.transition_estimate / p.g());
    else
        std::printf("transition estimate: none (T_b average never settles into the band)\n");

    if (!cfg.out.empty()) {
        const auto json = sibling(cfg.out, "", ".json");
        io::write_sweep_report(report, cfg.out, json);
        std::printf("wrote %s and %s\n", cfg.out.c_str(), json.string().c_str());
    }
    if (!cfg.plot.empty()) {
        io::render_plot(report, io::PlotKind::PhaseVsCoupling, cfg.plot);
        std::printf("wrote %s\n", cfg.plot.c_str());
    }
    return 0;
}

int run_converge(const RunConfig& cfg) {
    const auto p = params_of(cfg);
    print_params(p);
    const auto rows = check_mode_convergence(p, cfg.converge_n, cfg.t_max_tb * p.bypass_time(), cfg.dt_div);
    for (const auto& r : rows)
        std::printf("N = %d -> %d: sup |delta pop_sigma| = %.6g\n", r.n_from, r.n_to, r.sup_deviation);
    if (!cfg.out.empty()) {
        io::write_convergence_csv(rows, cfg.out);
        std::printf("wrote %s\n", cfg.out.c_str());
    }
    return 0;
}

struct Preset {
    io::RunKind kind;
    std::string text; // config lines applied before --config and flags
    io::PlotKind plot;
    bool compare{false};
};

const std::map<std::string, Preset>& presets() {
    static const std::map<std::string, Preset> table{
        {"fig2a", {io::RunKind::Simulate, "omega_over_g = 5\n", io::PlotKind::Populations}},
        {"fig2b", {io::RunKind::Simulate, "", io::PlotKind::Populations}},
        {"fig3a", {io::RunKind::Simulate, "", io::PlotKind::EnergyFlow}},
        {"fig3b", {io::RunKind::Simulate, "omega_over_g = 5\n", io::PlotKind::EnergyFlow}},
        {"fig4", {io::RunKind::Sweep, "", io::PlotKind::PhaseVsCoupling}},
        {"fig5a", {io::RunKind::Spectrum, "", io::PlotKind::WeightSpectrum}},
        {"fig5b", {io::RunKind::Spectrum, "omega_over_g = 5\n", io::PlotKind::WeightSpectrum}},
        {"fig1a", {io::RunKind::Markov, "t_max_tb = 1\n", io::PlotKind::Populations, true}},
    };
    return table;
}

int dispatch(const RunConfig& cfg, io::PlotKind plot = io::PlotKind::Populations, bool compare = false) {
    switch (cfg.kind) {
    case io::RunKind::Simulate: return run_simulate(cfg, plot);
    case io::RunKind::Markov: return compare ? run_compare(cfg) : run_markov(cfg);
    case io::RunKind::Spectrum: return run_spectrum(cfg);
    case io::RunKind::Sweep: return run_sweep(cfg);
    case io::RunKind::Converge: return run_converge(cfg);
    }
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atom-cavity-ring resonator simulator"};
    app.require_subcommand(1);

    FlagSet simulate_flags, markov_flags, spectrum_flags, sweep_flags, converge_flags, fig_flags;
    auto* simulate = app.add_subcommand("simulate", "full-model trajectory");
    add_common(simulate, simulate_flags);
    simulate->add_option("--plot-kind", simulate_flags.plot_kind, "populations | energy_flow");
    auto* markov = app.add_subcommand("markov", "reduced (Markov) model trajectory");
    add_common(markov, markov_flags);
    auto* spectrum = app.add_subcommand("spectrum", "eigenfrequencies and atom weights");
    add_common(spectrum, spectrum_flags);
    auto* sweep = app.add_subcommand("sweep", "averaged phase difference against coupling");
    add_common(sweep, sweep_flags);
    auto* converge = app.add_subcommand("converge", "dependence on the number of ring modes");
    add_common(converge, converge_flags);
    std::string preset_name;
    auto* fig = app.add_subcommand("fig", "reproduce a figure: fig2a fig2b fig3a fig3b fig4 fig5a fig5b fig1a");
    fig->add_option("preset", preset_name, "figure preset")->required();
    add_common(fig, fig_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*simulate) {
            const auto kind = simulate_flags.plot_kind.empty() ? io::PlotKind::Populations
                                                               : io::parse_plot_kind(simulate_flags.plot_kind);
            return dispatch(load(simulate, simulate_flags, io::RunKind::Simulate), kind);
        }
        if (*markov)
            return dispatch(load(markov, markov_flags, io::RunKind::Markov));
        if (*spectrum)
            return dispatch(load(spectrum, spectrum_flags, io::RunKind::Spectrum));
        if (*sweep)
            return dispatch(load(sweep, sweep_flags, io::RunKind::Sweep));
        if (*converge)
            return dispatch(load(converge, converge_flags, io::RunKind::Converge));
        if (*fig) {
            const auto it = presets().find(preset_name);
            if (it == presets().end())
                throw Error(ErrorKind::UnknownKind, "figure preset '" + preset_name + "'");
            const Preset& pr = it->second;
            RunConfig cfg = load(fig, fig_flags, pr.kind, pr.text);
            if (cfg.out.empty())
                cfg.out = preset_name + ".csv";
            if (cfg.plot.empty())
                cfg.plot = preset_name + ".svg";
            return dispatch(cfg, pr.plot, pr.compare);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.is_validation() ? 2 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 3;
}
