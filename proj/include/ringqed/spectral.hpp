// spectral.hpp: eigendecomposition of the single-excitation Hamiltonian and
// exact propagation by spectral expansion.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ringqed/arrowhead.hpp"
#include "ringqed/constants.hpp"
#include "ringqed/core_model.hpp"
#include "ringqed/error.hpp"

namespace ringqed {

enum class Solver {
    Dense,     // LAPACK-style tridiagonal QR via Eigen
    Arrowhead, // secular-equation fast path
};

/// Reference frame for amplitudes. Observables such as |C|^2, Im(C_s^* C_a)
/// and arg(C_a / C_s) are identical in both.
enum class Frame {
    Lab,
    Rotating, // common carrier exp(-i omega0 t) removed
};

/// Eigenpairs of H. Eigenvectors are the columns of `eigenvectors`, sorted by
/// ascending frequency.
struct Spectrum {
    int n_modes{0};
    double omega0{1.0};
    Eigen::VectorXd detunings;       // f_l - omega0, computed without the carrier
    Eigen::VectorXd eigenfrequencies; // f_l
    Eigen::MatrixXd eigenvectors;
    Eigen::VectorXd atom_weights;     // |h_{l1}|^2

    Eigen::Index dimension() const noexcept { return detunings.size(); }
};

inline Spectrum make_spectrum(const ArrowHamiltonian& h, Eigen::VectorXd detunings,
                              Eigen::MatrixXd vectors) {
    Spectrum s;
    s.n_modes = h.params().n_modes();
    s.omega0 = h.params().omega0();
    s.eigenfrequencies = detunings.array() + s.omega0;
    s.detunings = std::move(detunings);
    s.eigenvectors = std::move(vectors);
    s.atom_weights = s.eigenvectors.row(kAtom).transpose().array().square();
    return s;
}

inline Spectrum eigendecompose(const ArrowHamiltonian& h, Solver solver = Solver::Dense) {
    const double shift = h.params().omega0();
    if (solver == Solver::Dense) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense(shift));
        if (es.info() != Eigen::Success) {
            const auto& p = h.params();
            throw Error(ErrorKind::ConvergenceFailure,
                        "dense eigensolver failed (dim=" + std::to_string(h.dimension()) +
                            ", omega=" + std::to_string(p.omega()) + ", g=" + std::to_string(p.g()) +
                            ", dw=" + std::to_string(p.mode_spacing()) + ")");
        }
        return make_spectrum(h, es.eigenvalues(), es.eigenvectors());
    }

    // Cavity is the hub; spokes are the atom followed by the ring modes.
    const Eigen::Index n = h.dimension();
    std::vector<double> d;
    std::vector<double> z;
    d.reserve(static_cast<std::size_t>(n - 1));
    z.reserve(static_cast<std::size_t>(n - 1));
    d.push_back(h.diagonal()[kAtom] - shift);
    z.push_back(h.atom_cavity_coupling());
    for (Eigen::Index k = kFirstMode; k < n; ++k) {
        d.push_back(h.diagonal()[k] - shift);
        z.push_back(h.cavity_mode_coupling());
    }
    auto dec = arrowhead::eigendecompose(h.diagonal()[kCavity] - shift, d, z);

    // arrowhead rows are (hub, atom, modes...) -> physical (atom, cavity, modes...)
    Eigen::MatrixXd vectors(n, n);
    vectors.row(kAtom) = dec.vectors.row(1);
    vectors.row(kCavity) = dec.vectors.row(0);
    vectors.bottomRows(n - kFirstMode) = dec.vectors.bottomRows(n - 2);
    return make_spectrum(h, std::move(dec.values), std::move(vectors));
}

/// max |H - V F V^T| over all entries, relative to max |H_ij|.
inline double reconstruction_residual(const ArrowHamiltonian& h, const Spectrum& s) {
    const Eigen::MatrixXd dense = h.dense(s.omega0);
    const Eigen::MatrixXd rebuilt = s.eigenvectors * s.detunings.asDiagonal() * s.eigenvectors.transpose();
    const double scale = std::max(h.dense().cwiseAbs().maxCoeff(), 1e-300);
    return (dense - rebuilt).cwiseAbs().maxCoeff() / scale;
}

/// max |V^T V - I|.
inline double orthonormality_defect(const Spectrum& s) {
    const Eigen::Index n = s.dimension();
    return (s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(n, n))
        .cwiseAbs()
        .maxCoeff();
}

/// C(t) = sum_l (h_l . C(0)) h_l exp(-i f_l t).
inline AmplitudeState propagate_spectral(const Spectrum& spec, const AmplitudeState& state0, double t,
                                         Frame frame = Frame::Lab) {
    if (state0.dimension() != spec.dimension() || state0.n_modes() != spec.n_modes)
        throw Error(ErrorKind::DimensionMismatch,
                    "state has dimension " + std::to_string(state0.dimension()) + ", spectrum " +
                        std::to_string(spec.dimension()));
    if (t == 0.0)
        return state0;

    const Eigen::VectorXcd coeffs = spec.eigenvectors.transpose().cast<complex>() * state0.vector();
    Eigen::VectorXcd evolved(coeffs.size());
    for (Eigen::Index l = 0; l < coeffs.size(); ++l)
        evolved[l] = coeffs[l] * std::polar(1.0, -spec.detunings[l] * t);
    Eigen::VectorXcd out = spec.eigenvectors.cast<complex>() * evolved;
    if (frame == Frame::Lab)
        out *= std::polar(1.0, -spec.omega0 * t);
    return AmplitudeState(state0.n_modes(), std::move(out));
}

struct WeightPoint {
    double frequency;
    double weight;
};

/// (f_l, |h_{l1}|^2) pairs, ascending in f_l.
inline std::vector<WeightPoint> mode_weight_distribution(const Spectrum& spec) {
    std::vector<WeightPoint> out;
    out.reserve(static_cast<std::size_t>(spec.dimension()));
    for (Eigen::Index l = 0; l < spec.dimension(); ++l)
        out.push_back({spec.eigenfrequencies[l], spec.atom_weights[l]});
    return out;
}

/// Total atom weight carried by eigenvectors with |f_l - center| <= half_width.
inline double weight_within(const Spectrum& spec, double center, double half_width) {
    double sum = 0.0;
    const double offset = center - spec.omega0;
    for (Eigen::Index l = 0; l < spec.dimension(); ++l)
        if (std::abs(spec.detunings[l] - offset) <= half_width)
            sum += spec.atom_weights[l];
    return sum;
}

} // namespace ringqed
