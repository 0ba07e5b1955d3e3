// core_model.hpp: physical parameters, the single-excitation Hamiltonian,
// and initial states for an atom in a cavity coupled to a ring resonator.
//
// Basis ordering used throughout the library:
//   index 0      atom excited             |e,0,0>
//   index 1      cavity photon            |g,1,0>
//   index 2 + k  ring mode j = k - N/2    |g,0,1_j>,  k = 0..N

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringqed/error.hpp"

namespace ringqed {

using complex = std::complex<double>;

inline constexpr Eigen::Index kAtom = 0;
inline constexpr Eigen::Index kCavity = 1;
inline constexpr Eigen::Index kFirstMode = 2;

/// Unvalidated parameter record, e.g. as read from a config file.
struct RawParams {
    double omega0{1.0};
    double omega{0.001};        // atom-cavity coupling
    double g{0.003};            // cavity-mode coupling, same for every mode
    double mode_spacing{0.002}; // delta omega
    int n_modes{100};           // even; modes j = -N/2 .. N/2
};

/// Validated physical configuration. Only obtainable from validate_params,
/// so every instance satisfies g > 0, dw > 0, Omega >= 0, N >= 2 and even.
class SystemParams {
public:
    double omega0() const noexcept { return omega0_; }
    double omega() const noexcept { return omega_; }
    double g() const noexcept { return g_; }
    double mode_spacing() const noexcept { return mode_spacing_; }
    int n_modes() const noexcept { return n_modes_; }

    /// Number of ring modes actually simulated (N + 1).
    std::size_t mode_count() const noexcept { return static_cast<std::size_t>(n_modes_) + 1; }
    /// Hilbert-space dimension of the single-excitation sector (N + 3).
    Eigen::Index dimension() const noexcept { return n_modes_ + 3; }

    /// Round-trip time of light in the ring, 2 pi / dw.
    double bypass_time() const noexcept { return 2.0 * std::numbers::pi / mode_spacing_; }
    /// Born-Markov cavity decay rate pi g^2 / dw.
    double markov_gamma() const noexcept { return std::numbers::pi * g_ * g_ / mode_spacing_; }
    /// Slow atomic amplitude decay rate 2 Omega^2 / (g^2 T_b).
    double effective_decay() const noexcept {
        return 2.0 * omega_ * omega_ / (g_ * g_ * bypass_time());
    }

    RawParams raw() const noexcept { return {omega0_, omega_, g_, mode_spacing_, n_modes_}; }

    /// Copy with a different atom-cavity coupling (validated).
    SystemParams with_omega(double omega) const;
    /// Copy with a different mode count (validated).
    SystemParams with_n_modes(int n_modes) const;

    friend SystemParams validate_params(const RawParams& raw);

    friend bool operator==(const SystemParams&, const SystemParams&) = default;

private:
    SystemParams() = default;

    double omega0_{1.0};
    double omega_{0.0};
    double g_{1.0};
    double mode_spacing_{1.0};
    int n_modes_{2};
};

inline SystemParams validate_params(const RawParams& raw) {
    if (!(raw.omega0 > 0.0) || !std::isfinite(raw.omega0))
        throw Error(ErrorKind::NonPositive, "omega0 must be positive");
    if (!(raw.g > 0.0) || !std::isfinite(raw.g))
        throw Error(ErrorKind::NonPositive, "g must be positive");
    if (!(raw.mode_spacing > 0.0) || !std::isfinite(raw.mode_spacing))
        throw Error(ErrorKind::NonPositive, "mode_spacing must be positive");
    if (!(raw.omega >= 0.0) || !std::isfinite(raw.omega))
        throw Error(ErrorKind::NegativeCoupling, "omega must be non-negative");
    if (raw.n_modes < 2)
        throw Error(ErrorKind::NonPositive, "n_modes must be at least 2");
    if (raw.n_modes % 2 != 0)
        throw Error(ErrorKind::OddModeCount,
                    "n_modes must be even, got " + std::to_string(raw.n_modes));

    SystemParams p;
    p.omega0_ = raw.omega0;
    p.omega_ = raw.omega;
    p.g_ = raw.g;
    p.mode_spacing_ = raw.mode_spacing;
    p.n_modes_ = raw.n_modes;
    return p;
}

inline SystemParams SystemParams::with_omega(double omega) const {
    RawParams r = raw();
    r.omega = omega;
    return validate_params(r);
}

inline SystemParams SystemParams::with_n_modes(int n_modes) const {
    RawParams r = raw();
    r.n_modes = n_modes;
    return validate_params(r);
}

/// Ring mode frequencies omega0 + j dw for j = -N/2 .. N/2, ascending.
inline std::vector<double> mode_frequencies(const SystemParams& p) {
    const int half = p.n_modes() / 2;
    std::vector<double> freqs;
    freqs.reserve(p.mode_count());
    for (int j = -half; j <= half; ++j)
        freqs.push_back(p.omega0() + j * p.mode_spacing());
    return freqs;
}

/// Single-excitation Hamiltonian in compact arrowhead form: the cavity is the
/// hub, coupled to the atom by Omega and to every ring mode by g.
class ArrowHamiltonian {
public:
    explicit ArrowHamiltonian(const SystemParams& p)
        : params_(p)
        , diagonal_(p.dimension()) {
        diagonal_[kAtom] = p.omega0();
        diagonal_[kCavity] = p.omega0();
        const auto modes = mode_frequencies(p);
        for (std::size_t k = 0; k < modes.size(); ++k)
            diagonal_[kFirstMode + static_cast<Eigen::Index>(k)] = modes[k];
    }

    const SystemParams& params() const noexcept { return params_; }
    Eigen::Index dimension() const noexcept { return diagonal_.size(); }
    const Eigen::VectorXd& diagonal() const noexcept { return diagonal_; }
    double atom_cavity_coupling() const noexcept { return params_.omega(); }
    double cavity_mode_coupling() const noexcept { return params_.g(); }

    /// Dense matrix with `shift` subtracted from the diagonal.
    Eigen::MatrixXd dense(double shift = 0.0) const {
        const Eigen::Index n = dimension();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        h.diagonal() = diagonal_.array() - shift;
        h(kAtom, kCavity) = h(kCavity, kAtom) = params_.omega();
        for (Eigen::Index k = kFirstMode; k < n; ++k)
            h(kCavity, k) = h(k, kCavity) = params_.g();
        return h;
    }

    /// (H - shift) x in O(N) operations.
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x, double shift = 0.0) const {
        const Eigen::Index n = dimension();
        Eigen::VectorXcd y = (diagonal_.array() - shift).cast<complex>() * x.array();
        const double om = params_.omega();
        const double g = params_.g();
        y[kAtom] += om * x[kCavity];
        y[kCavity] += om * x[kAtom] + g * x.segment(kFirstMode, n - kFirstMode).sum();
        y.segment(kFirstMode, n - kFirstMode).array() += g * x[kCavity];
        return y;
    }

private:
    SystemParams params_;
    Eigen::VectorXd diagonal_;
};

inline ArrowHamiltonian build_hamiltonian(const SystemParams& p) { return ArrowHamiltonian(p); }

/// Amplitudes (C_sigma, C_a, C_{-N/2} .. C_{N/2}) of a single-excitation state.
class AmplitudeState {
public:
    AmplitudeState(int n_modes, Eigen::VectorXcd amplitudes)
        : n_modes_(n_modes)
        , amps_(std::move(amplitudes)) {
        if (amps_.size() != n_modes_ + 3)
            throw Error(ErrorKind::DimensionMismatch,
                        "expected " + std::to_string(n_modes_ + 3) + " amplitudes, got " +
                            std::to_string(amps_.size()));
    }

    int n_modes() const noexcept { return n_modes_; }
    Eigen::Index dimension() const noexcept { return amps_.size(); }

    complex c_sigma() const { return amps_[kAtom]; }
    complex c_cavity() const { return amps_[kCavity]; }
    auto c_modes() const { return amps_.segment(kFirstMode, n_modes_ + 1); }
    /// Amplitude of ring mode j, -N/2 <= j <= N/2.
    complex mode(int j) const { return amps_[kFirstMode + j + n_modes_ / 2]; }

    const Eigen::VectorXcd& vector() const noexcept { return amps_; }
    double norm_squared() const { return amps_.squaredNorm(); }
    /// Excitation current between atom and cavity, Im(C_sigma^* C_a).
    double energy_flow() const { return std::imag(std::conj(c_sigma()) * c_cavity()); }

private:
    int n_modes_;
    Eigen::VectorXcd amps_;
};

/// Excitation entirely in the atom: C_sigma = 1, all else 0.
inline AmplitudeState initial_state(const SystemParams& p) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(p.dimension());
    v[kAtom] = 1.0;
    return AmplitudeState(p.n_modes(), std::move(v));
}

} // namespace ringqed
