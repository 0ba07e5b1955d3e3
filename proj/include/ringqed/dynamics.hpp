// dynamics.hpp: time-grid evolution of the single-excitation amplitudes,
// a fixed-step RK4 oracle, and the observable series derived from them.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringqed/constants.hpp"
#include "ringqed/core_model.hpp"
#include "ringqed/error.hpp"
#include "ringqed/spectral.hpp"

namespace ringqed {

struct TimeGrid {
    double start{0.0};
    double step{1.0};
    std::size_t count{0};

    double at(std::size_t i) const noexcept { return start + static_cast<double>(i) * step; }
    double end() const noexcept { return count == 0 ? start : at(count - 1); }
};

/// Uniform grid 0, dt, 2 dt, ... up to t_max (inclusive within rounding).
inline TimeGrid make_grid(double t_max, double dt, std::size_t max_points = Defaults::max_grid_points) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorKind::Precondition, "dt must be positive");
    if (!(t_max >= dt))
        throw Error(ErrorKind::Precondition, "t_max must be at least dt");
    const double steps = std::floor(t_max / dt + 1e-9);
    if (steps + 1.0 > static_cast<double>(max_points))
        throw Error(ErrorKind::GridTooLarge,
                    "grid of " + std::to_string(static_cast<long long>(steps + 1.0)) +
                        " points exceeds cap " + std::to_string(max_points) +
                        "; use a larger dt or a shorter t_max");
    return {0.0, dt, static_cast<std::size_t>(steps) + 1};
}

struct Snapshot {
    std::size_t index; // grid index
    AmplitudeState state;
};

/// (C_sigma, C_a) at every grid point in the frame rotating at omega0, plus
/// full-state snapshots every `snapshot_stride` points. Reduced (two-mode)
/// trajectories carry no snapshots.
struct Trajectory {
    SystemParams params;
    TimeGrid grid;
    Frame frame{Frame::Rotating};
    std::vector<complex> c_sigma;
    std::vector<complex> c_cavity;
    std::size_t snapshot_stride{0};
    std::vector<Snapshot> snapshots;

    std::size_t size() const noexcept { return grid.count; }
};

struct EvolveOptions {
    std::size_t snapshot_stride{Defaults::snapshot_stride};
    std::size_t max_points{Defaults::max_grid_points};
    Solver solver{Solver::Dense};
};

/// Trajectory from the atom-excited initial state via spectral propagation.
inline Trajectory evolve_trajectory(const SystemParams& p, double t_max, double dt,
                                    const EvolveOptions& opts = {}) {
    const TimeGrid grid = make_grid(t_max, dt, opts.max_points);
    const Spectrum spec = eigendecompose(build_hamiltonian(p), opts.solver);
    const AmplitudeState psi0 = initial_state(p);

    // The initial state is real, so the expansion coefficients are real.
    const Eigen::VectorXd coeffs = spec.eigenvectors.transpose() * psi0.vector().real();
    const Eigen::VectorXd row_sigma = spec.eigenvectors.row(kAtom).transpose().cwiseProduct(coeffs);
    const Eigen::VectorXd row_cavity = spec.eigenvectors.row(kCavity).transpose().cwiseProduct(coeffs);
    const Eigen::Index dim = spec.dimension();

    Trajectory traj{p, grid, Frame::Rotating, {}, {}, opts.snapshot_stride, {}};
    traj.c_sigma.reserve(grid.count);
    traj.c_cavity.reserve(grid.count);

    Eigen::VectorXcd phases(dim);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const bool snap = opts.snapshot_stride > 0 && i % opts.snapshot_stride == 0;
        if (i == 0) {
            traj.c_sigma.push_back(psi0.c_sigma());
            traj.c_cavity.push_back(psi0.c_cavity());
            if (snap)
                traj.snapshots.push_back({0, psi0});
            continue;
        }
        const double t = grid.at(i);
        for (Eigen::Index l = 0; l < dim; ++l)
            phases[l] = std::polar(1.0, -spec.detunings[l] * t);
        if (snap) {
            Eigen::VectorXcd full = spec.eigenvectors.cast<complex>() * coeffs.cast<complex>().cwiseProduct(phases);
            traj.c_sigma.push_back(full[kAtom]);
            traj.c_cavity.push_back(full[kCavity]);
            traj.snapshots.push_back({i, AmplitudeState(p.n_modes(), std::move(full))});
        } else {
            traj.c_sigma.push_back((phases.array() * row_sigma.array()).sum());
            traj.c_cavity.push_back((phases.array() * row_cavity.array()).sum());
        }
    }
    return traj;
}

/// Largest generator scale used by the RK4 step-size heuristic (rotating frame).
inline double rk4_rate_bound(const SystemParams& p) {
    const double detuning = 0.5 * p.n_modes() * p.mode_spacing();
    return detuning + p.omega() + p.g() * std::sqrt(static_cast<double>(p.mode_count()));
}

/// Classic fixed-step RK4 on dC/dt = -i (H - omega0) C. Samples at every step.
inline Trajectory evolve_rk4_oracle(const SystemParams& p, double t_max, double dt,
                                    const EvolveOptions& opts = {}) {
    const TimeGrid grid = make_grid(t_max, dt, opts.max_points);
    if (dt * rk4_rate_bound(p) >= 0.1)
        throw Error(ErrorKind::StepTooLarge,
                    "dt * rate bound = " + std::to_string(dt * rk4_rate_bound(p)) + " must stay below 0.1");

    const ArrowHamiltonian h = build_hamiltonian(p);
    const double shift = p.omega0();
    const complex minus_i{0.0, -1.0};
    auto rhs = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return minus_i * h.apply(x, shift); };

    Trajectory traj{p, grid, Frame::Rotating, {}, {}, opts.snapshot_stride, {}};
    traj.c_sigma.reserve(grid.count);
    traj.c_cavity.reserve(grid.count);

    Eigen::VectorXcd x = initial_state(p).vector();
    for (std::size_t i = 0; i < grid.count; ++i) {
        if (i > 0) {
            const Eigen::VectorXcd k1 = rhs(x);
            const Eigen::VectorXcd k2 = rhs(x + 0.5 * dt * k1);
            const Eigen::VectorXcd k3 = rhs(x + 0.5 * dt * k2);
            const Eigen::VectorXcd k4 = rhs(x + dt * k3);
            x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        traj.c_sigma.push_back(x[kAtom]);
        traj.c_cavity.push_back(x[kCavity]);
        if (opts.snapshot_stride > 0 && i % opts.snapshot_stride == 0)
            traj.snapshots.push_back({i, AmplitudeState(p.n_modes(), x)});
    }
    return traj;
}

/// Populations, energy flow and phase difference on the trajectory grid.
struct ObservableSeries {
    double bypass_time{0.0};
    std::vector<double> times;
    std::vector<double> pop_sigma;
    std::vector<double> pop_cavity;
    std::vector<double> energy_flow; // Im(C_sigma^* C_a)
    std::vector<double> phase_diff;  // arg(C_a / C_sigma) in (-pi, pi]; NaN where masked
    std::vector<bool> phase_valid;

    std::size_t size() const noexcept { return times.size(); }
};

/// Principal value of arg(a / b) in (-pi, pi].
inline double phase_of_ratio(complex a, complex b) {
    double phi = std::arg(a * std::conj(b));
    if (phi <= -std::numbers::pi)
        phi = std::numbers::pi;
    return phi;
}

inline ObservableSeries compute_observables(const Trajectory& traj, double phase_floor = Defaults::phase_floor) {
    ObservableSeries s;
    s.bypass_time = traj.params.bypass_time();
    const std::size_t n = traj.size();
    s.times.resize(n);
    s.pop_sigma.resize(n);
    s.pop_cavity.resize(n);
    s.energy_flow.resize(n);
    s.phase_diff.resize(n);
    s.phase_valid.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const complex cs = traj.c_sigma[i];
        const complex ca = traj.c_cavity[i];
        s.times[i] = traj.grid.at(i);
        s.pop_sigma[i] = std::norm(cs);
        s.pop_cavity[i] = std::norm(ca);
        s.energy_flow[i] = std::imag(std::conj(cs) * ca);
        const bool valid = std::abs(cs) > phase_floor && std::abs(ca) > phase_floor;
        s.phase_valid[i] = valid;
        s.phase_diff[i] = valid ? phase_of_ratio(ca, cs) : std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

} // namespace ringqed
