// analysis.hpp: Born-Markov reduced model, decay-rate fitting, averaged
// phase difference, revival detection and the critical coupling.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ringqed/constants.hpp"
#include "ringqed/core_model.hpp"
#include "ringqed/dynamics.hpp"
#include "ringqed/error.hpp"

namespace ringqed {

// ---------------------------------------------------------------------------
// Reduced model
//
//   dC_s/dt = -i w0 C_s - i Omega C_a
//   dC_a/dt = (-i w0 - gamma) C_a - i Omega C_s,      gamma = pi g^2 / dw
//
// with eigenvalues lambda_pm = -i w0 - (gamma/2)(1 pm s), s = sqrt(1 - 4 Omega^2 / gamma^2).
// ---------------------------------------------------------------------------

struct MarkovParams {
    double omega0{1.0};
    double omega{0.0};
    double gamma{0.0};
    double gamma_prime{0.0};
    complex root{1.0};     // s, principal branch (purely imaginary when underdamped)
    complex lambda_plus;
    complex lambda_minus;
    bool underdamped{false}; // 4 Omega^2 > gamma^2
    bool critical{false};    // 4 Omega^2 == gamma^2
};

inline MarkovParams markov_parameters(const SystemParams& p) {
    MarkovParams mp;
    mp.omega0 = p.omega0();
    mp.omega = p.omega();
    mp.gamma = p.markov_gamma();
    mp.gamma_prime = p.effective_decay();
    const double ratio = 2.0 * p.omega() / mp.gamma;
    const double disc = 1.0 - ratio * ratio;
    mp.critical = std::abs(disc) <= 4.0 * std::numeric_limits<double>::epsilon();
    mp.underdamped = !mp.critical && disc < 0.0;
    mp.root = mp.critical ? complex{0.0} : std::sqrt(complex{disc, 0.0});
    const complex carrier{0.0, -mp.omega0};
    mp.lambda_plus = carrier - 0.5 * mp.gamma * (1.0 + mp.root);
    mp.lambda_minus = carrier - 0.5 * mp.gamma * (1.0 - mp.root);
    return mp;
}

namespace detail {

// (C_s, C_a) of the reduced model in the frame rotating at omega0.
inline std::pair<complex, complex> markov_rotating(const MarkovParams& mp, double t) {
    const double half = 0.5 * mp.gamma;
    const complex i{0.0, 1.0};
    if (mp.omega == 0.0)
        return {1.0, 0.0};
    if (mp.critical) {
        // confluent limit: C_s = (1 + gamma t / 2) e^{-gamma t / 2}, C_a = -i Omega t e^{-gamma t / 2}
        const double decay = std::exp(-half * t);
        return {(1.0 + half * t) * decay, -i * mp.omega * t * decay};
    }
    const complex rp = -half * (1.0 + mp.root);
    const complex rm = -half * (1.0 - mp.root);
    // eigenvectors (i gamma / 2 Omega (1 mp s), 1) with weights alpha_pm = pm i (Omega / gamma) / s
    const complex vp = i * mp.gamma / (2.0 * mp.omega) * (1.0 - mp.root);
    const complex vm = i * mp.gamma / (2.0 * mp.omega) * (1.0 + mp.root);
    const complex ap = i * (mp.omega / mp.gamma) / mp.root;
    const complex am = -ap;
    const complex ep = std::exp(rp * t);
    const complex em = std::exp(rm * t);
    return {ap * vp * ep + am * vm * em, ap * ep + am * em};
}

} // namespace detail

/// C_s(t) = 1/2 (1 - 1/s) e^{lambda_+ t} + 1/2 (1 + 1/s) e^{lambda_- t}, lab frame.
/// At critical damping the confluent form (1 + gamma t/2) e^{lambda t} is used.
inline complex markov_sigma_amplitude(const MarkovParams& mp, double t) {
    if (mp.critical)
        return detail::markov_rotating(mp, t).first * std::polar(1.0, -mp.omega0 * t);
    // same sum written as e^{l- t} + c+ (e^{l+ t} - e^{l- t}), exact at t = 0
    const complex inv_s = 1.0 / mp.root;
    const complex slow = std::exp(mp.lambda_minus * t);
    return slow + 0.5 * (1.0 - inv_s) * (std::exp(mp.lambda_plus * t) - slow);
}

/// Two-component trajectory of the reduced model (rotating frame, no snapshots).
inline Trajectory markov_trajectory(const SystemParams& p, double t_max, double dt,
                                    std::size_t max_points = Defaults::max_grid_points) {
    const TimeGrid grid = make_grid(t_max, dt, max_points);
    const MarkovParams mp = markov_parameters(p);
    Trajectory traj{p, grid, Frame::Rotating, {}, {}, 0, {}};
    traj.c_sigma.reserve(grid.count);
    traj.c_cavity.reserve(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const auto [cs, ca] = i == 0 ? std::pair<complex, complex>{1.0, 0.0}
                                     : detail::markov_rotating(mp, grid.at(i));
        traj.c_sigma.push_back(cs);
        traj.c_cavity.push_back(ca);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Decay-rate fit
// ---------------------------------------------------------------------------

struct TimeWindow {
    double begin;
    double end;
};

/// Least-squares decay rate of |C_sigma| over `window`. When |C_sigma| has at
/// least three interior local maxima in the window, only those (the upper
/// envelope) enter the fit.
inline double fit_decay_rate(const ObservableSeries& series, TimeWindow window) {
    const double slack = 1e-9 * series.bypass_time;
    if (window.begin < -slack || window.end > series.bypass_time + slack || window.end <= window.begin)
        throw Error(ErrorKind::Precondition, "decay window must lie within [0, T_b]");

    std::vector<std::size_t> in_window;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series.times[i] >= window.begin - slack && series.times[i] <= window.end + slack)
            in_window.push_back(i);
    if (in_window.size() < 2)
        throw Error(ErrorKind::EmptyWindow, "fewer than two samples in decay window");
    for (std::size_t i : in_window)
        if (!(series.pop_sigma[i] > 0.0))
            throw Error(ErrorKind::NonPositiveAmplitude,
                        "|C_sigma| vanishes at t = " + std::to_string(series.times[i]));

    std::vector<std::size_t> peaks;
    for (std::size_t k = 1; k + 1 < in_window.size(); ++k) {
        const double here = series.pop_sigma[in_window[k]];
        if (here > series.pop_sigma[in_window[k - 1]] && here >= series.pop_sigma[in_window[k + 1]])
            peaks.push_back(in_window[k]);
    }
    const auto& points = peaks.size() >= 3 ? peaks : in_window;

    // slope of ln|C| = 0.5 ln pop against t
    double mean_t = 0.0;
    double mean_y = 0.0;
    for (std::size_t i : points) {
        mean_t += series.times[i];
        mean_y += 0.5 * std::log(series.pop_sigma[i]);
    }
    mean_t /= static_cast<double>(points.size());
    mean_y /= static_cast<double>(points.size());
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t i : points) {
        const double dt = series.times[i] - mean_t;
        stt += dt * dt;
        sty += dt * (0.5 * std::log(series.pop_sigma[i]) - mean_y);
    }
    return -sty / stt;
}

// ---------------------------------------------------------------------------
// Averaged phase difference
// ---------------------------------------------------------------------------

struct PhaseAverage {
    double horizon{0.0};
    double mean{0.0};
    double masked_fraction{0.0};
    std::size_t samples{0};
};

/// Mean of the principal-value phase arg(C_a / C_sigma) over unmasked grid
/// points with t in [0, horizon]. No unwrapping.
inline PhaseAverage averaged_phase_difference(const ObservableSeries& series, double horizon) {
    if (series.size() == 0 || series.times.back() < horizon * (1.0 - 1e-9))
        throw Error(ErrorKind::HorizonTooShort, "series ends before the averaging horizon");
    double sum = 0.0;
    std::size_t used = 0;
    std::size_t total = 0;
    const double limit = horizon * (1.0 + 1e-12);
    for (std::size_t i = 0; i < series.size() && series.times[i] <= limit; ++i) {
        ++total;
        if (series.phase_valid[i]) {
            sum += series.phase_diff[i];
            ++used;
        }
    }
    if (used == 0)
        throw Error(ErrorKind::AllMasked, "no unmasked phase samples within horizon");
    return {horizon, sum / static_cast<double>(used),
            static_cast<double>(total - used) / static_cast<double>(total), used};
}

struct PhaseAverages {
    double avg_over_Tb{0.0};
    double avg_over_2Tb{0.0};
    double masked_fraction{0.0}; // over the two-bypass horizon
};

inline PhaseAverages phase_averages(const ObservableSeries& series) {
    const auto one = averaged_phase_difference(series, series.bypass_time);
    const auto two = averaged_phase_difference(series, 2.0 * series.bypass_time);
    return {one.mean, two.mean, two.masked_fraction};
}

// ---------------------------------------------------------------------------
// Revivals
// ---------------------------------------------------------------------------

enum class Recurrence { Doubled, Single, Indeterminate };

inline const char* to_string(Recurrence r) {
    switch (r) {
    case Recurrence::Doubled: return "Doubled";
    case Recurrence::Single: return "Single";
    case Recurrence::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

struct RecurrenceReport {
    double threshold{0.0};
    std::vector<double> revival_times;
    std::vector<double> revival_heights;
    std::optional<double> poincare_time;
    Recurrence classification{Recurrence::Indeterminate};
};

/// Interior local maxima of |C_sigma|^2 above `threshold`, at least
/// `min_separation` (in units of T_b) apart; of two closer maxima the higher
/// one is kept. Classification:
///   Doubled  first revival in (1.5 T_b, 2.5 T_b), none in (0.5 T_b, 1.5 T_b)
///   Single   first revival in (0.5 T_b, 1.5 T_b)
///   otherwise Indeterminate.
inline RecurrenceReport detect_revivals(const ObservableSeries& series, double threshold,
                                        double min_separation = Defaults::revival_separation_tb) {
    const double tb = series.bypass_time;
    if (!(threshold > 0.0 && threshold < 1.0))
        throw Error(ErrorKind::Precondition, "revival threshold must lie in (0, 1)");
    if (series.size() < 3 || series.times.back() < 2.5 * tb * (1.0 - 1e-9))
        throw Error(ErrorKind::HorizonTooShort, "revival detection needs the series to cover [0, 2.5 T_b]");

    RecurrenceReport report;
    report.threshold = threshold;
    const auto& pop = series.pop_sigma;
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        if (!(pop[i] > pop[i - 1] && pop[i] >= pop[i + 1] && pop[i] >= threshold))
            continue;
        const double t = series.times[i];
        if (!report.revival_times.empty() && t - report.revival_times.back() < min_separation * tb) {
            if (pop[i] > report.revival_heights.back()) {
                report.revival_times.back() = t;
                report.revival_heights.back() = pop[i];
            }
            continue;
        }
        report.revival_times.push_back(t);
        report.revival_heights.push_back(pop[i]);
    }

    if (report.revival_times.empty())
        return report;
    report.poincare_time = report.revival_times.front();

    auto any_in = [&](double lo, double hi) {
        for (double t : report.revival_times)
            if (t > lo * tb && t < hi * tb)
                return true;
        return false;
    };
    const double first = report.revival_times.front() / tb;
    if (first > 1.5 && first < 2.5 && !any_in(0.5, 1.5))
        report.classification = Recurrence::Doubled;
    else if (first > 0.5 && first < 1.5)
        report.classification = Recurrence::Single;
    return report;
}

/// Doubled only when confirmed at `doubled_threshold`, Single when detected at
/// `single_threshold`, Indeterminate otherwise.
inline Recurrence classify_recurrence(const ObservableSeries& series,
                                      double single_threshold = Defaults::revival_single,
                                      double doubled_threshold = Defaults::revival_doubled) {
    if (detect_revivals(series, doubled_threshold).classification == Recurrence::Doubled)
        return Recurrence::Doubled;
    if (detect_revivals(series, single_threshold).classification == Recurrence::Single)
        return Recurrence::Single;
    return Recurrence::Indeterminate;
}

// ---------------------------------------------------------------------------
// Critical coupling
// ---------------------------------------------------------------------------

struct CriticalCoupling {
    double omega;              // g / sqrt(2)
    double decay_times_bypass; // gamma'(omega) T_b, equals 1
    double decay_over_spacing; // 2 pi gamma'(omega) / dw, equals 1
};

inline CriticalCoupling critical_coupling(const SystemParams& p) {
    const double omega = p.g() / std::numbers::sqrt2;
    const double tb = p.bypass_time();
    const double gp = 2.0 * omega * omega / (p.g() * p.g() * tb);
    return {omega, gp * tb, 2.0 * std::numbers::pi * gp / p.mode_spacing()};
}

} // namespace ringqed
