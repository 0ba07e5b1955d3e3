// sweep.hpp: coupling sweeps, transition location and mode-count convergence

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ringqed/analysis.hpp"
#include "ringqed/constants.hpp"
#include "ringqed/core_model.hpp"
#include "ringqed/dynamics.hpp"
#include "ringqed/error.hpp"

namespace ringqed {

struct SweepOptions {
    int dt_divisor{Defaults::dt_divisor};
    double phase_floor{Defaults::phase_floor};
    double revival_single{Defaults::revival_single};
    double revival_doubled{Defaults::revival_doubled};
    double band{Defaults::phase_band};
    double fit_window_tb{0.8};
    unsigned threads{1};
};

struct SweepRow {
    double omega{0.0};
    double omega_over_g{0.0};
    double avg_phase_Tb{std::numeric_limits<double>::quiet_NaN()};
    double avg_phase_2Tb{std::numeric_limits<double>::quiet_NaN()};
    double masked_fraction{std::numeric_limits<double>::quiet_NaN()};
    Recurrence classification{Recurrence::Indeterminate};
    double gamma_prime_fit{std::numeric_limits<double>::quiet_NaN()};
    double gamma_prime_pred{std::numeric_limits<double>::quiet_NaN()};
    std::optional<std::string> failure;

    bool ok() const noexcept { return !failure.has_value(); }
};

struct SweepReport {
    SystemParams params;
    double t_max{0.0};
    double band{Defaults::phase_band};
    std::vector<SweepRow> rows; // ascending omega
    std::optional<double> transition_estimate;
};

/// `count` points log-spaced over [lo, hi].
inline std::vector<double> log_spaced(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi >= lo))
        throw Error(ErrorKind::Precondition, "log_spaced needs 0 < lo <= hi and count >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1)
        return {lo};
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < count; ++i)
        out.push_back(std::exp(a + (b - a) * i / (count - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Default coupling grid: 40 points log-spaced over [0.1 g, 3 g].
inline std::vector<double> default_coupling_grid(const SystemParams& p) {
    return log_spaced(Defaults::sweep_min_over_g * p.g(), Defaults::sweep_max_over_g * p.g(), Defaults::sweep_points);
}

/// One sweep row: full-model trajectory at `omega` and its derived metrics.
inline SweepRow sweep_row(const SystemParams& base, double omega, double t_max, const SweepOptions& opts) {
    SweepRow row;
    row.omega = omega;
    row.omega_over_g = omega / base.g();
    try {
        const SystemParams p = base.with_omega(omega);
        const double tb = p.bypass_time();
        row.gamma_prime_pred = p.effective_decay();
        const auto series = compute_observables(evolve_trajectory(p, t_max, tb / opts.dt_divisor), opts.phase_floor);
        const auto avg = phase_averages(series);
        row.avg_phase_Tb = avg.avg_over_Tb;
        row.avg_phase_2Tb = avg.avg_over_2Tb;
        row.masked_fraction = avg.masked_fraction;
        if (series.times.back() >= 2.5 * tb * (1.0 - 1e-9))
            row.classification = classify_recurrence(series, opts.revival_single, opts.revival_doubled);
        try {
            row.gamma_prime_fit = fit_decay_rate(series, {0.0, opts.fit_window_tb * tb});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonPositiveAmplitude && e.kind() != ErrorKind::EmptyWindow)
                throw;
        }
    } catch (const std::exception& e) {
        row.failure = e.what();
    }
    return row;
}

/// Smallest coupling above which |avg_phase_Tb| stays within `band`, linearly
/// interpolated between the bracketing rows. Failed rows are skipped.
inline double locate_transition(const SweepReport& report, double band) {
    std::vector<const SweepRow*> rows;
    for (const auto& r : report.rows)
        if (r.ok() && std::isfinite(r.avg_phase_Tb))
            rows.push_back(&r);
    if (rows.size() < 5)
        throw Error(ErrorKind::Precondition, "transition location needs at least 5 valid rows");

    std::size_t last_outside = rows.size();
    for (std::size_t i = rows.size(); i-- > 0;) {
        if (std::abs(rows[i]->avg_phase_Tb) > band) {
            last_outside = i;
            break;
        }
    }
    if (last_outside == rows.size())
        throw Error(ErrorKind::NoCrossing, "|avg_phase_Tb| never leaves the band");
    if (last_outside + 1 == rows.size())
        throw Error(ErrorKind::NoCrossing, "|avg_phase_Tb| does not settle within the band");

    const SweepRow& a = *rows[last_outside];
    const SweepRow& b = *rows[last_outside + 1];
    const double va = std::abs(a.avg_phase_Tb);
    const double vb = std::abs(b.avg_phase_Tb);
    const double frac = (va - band) / (va - vb);
    return a.omega + frac * (b.omega - a.omega);
}

/// Rows are independent work items; results land in input order regardless
/// of thread count.
inline SweepReport sweep_coupling(const SystemParams& params, std::vector<double> omegas, double t_max,
                                  const SweepOptions& opts = {}) {
    if (omegas.empty())
        throw Error(ErrorKind::Precondition, "sweep needs at least one coupling value");
    for (double om : omegas)
        if (!(om > 0.0) || !std::isfinite(om))
            throw Error(ErrorKind::Precondition, "sweep couplings must be positive");
    if (t_max < 2.2 * params.bypass_time() * (1.0 - 1e-12))
        throw Error(ErrorKind::Precondition, "sweep needs t_max >= 2.2 T_b");
    std::sort(omegas.begin(), omegas.end());

    SweepReport report{params, t_max, opts.band, std::vector<SweepRow>(omegas.size()), std::nullopt};
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(omegas.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < omegas.size(); ++i)
            report.rows[i] = sweep_row(params, omegas[i], t_max, opts);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < omegas.size(); i = next++)
                    report.rows[i] = sweep_row(params, omegas[i], t_max, opts);
            });
        for (auto& th : pool)
            th.join();
    }

    try {
        report.transition_estimate = locate_transition(report, opts.band);
    } catch (const Error&) {
        report.transition_estimate.reset();
    }
    return report;
}

struct ConvergenceRow {
    int n_from;
    int n_to;
    double sup_deviation; // max_t | |C_s|^2(N_from) - |C_s|^2(N_to) |
};

inline std::vector<ConvergenceRow> check_mode_convergence(const SystemParams& params, const std::vector<int>& n_values,
                                                          double t_max, int dt_divisor = Defaults::dt_divisor) {
    if (n_values.size() < 2)
        throw Error(ErrorKind::Precondition, "convergence check needs at least two mode counts");
    if (!std::is_sorted(n_values.begin(), n_values.end()))
        throw Error(ErrorKind::Precondition, "mode counts must be ascending");

    const double dt = params.bypass_time() / dt_divisor;
    std::vector<std::vector<double>> pops;
    for (int n : n_values) {
        const SystemParams p = params.with_n_modes(n);
        const auto series = compute_observables(evolve_trajectory(p, t_max, dt));
        pops.push_back(series.pop_sigma);
    }
    std::vector<ConvergenceRow> out;
    for (std::size_t k = 0; k + 1 < n_values.size(); ++k) {
        double worst = 0.0;
        for (std::size_t i = 0; i < pops[k].size(); ++i)
            worst = std::max(worst, std::abs(pops[k][i] - pops[k + 1][i]));
        out.push_back({n_values[k], n_values[k + 1], worst});
    }
    return out;
}

} // namespace ringqed
