#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ringqed/spectral.hpp"
#include "test_fixtures.hpp"

using namespace ringqed;
using ringqed::test::figure_params;
using ringqed::test::kG;

namespace {

// Closed-form eigenvalues of [[w, W, 0], [W, w, g], [0, g, w]].
std::array<double, 3> three_level_eigenvalues(double w, double omega, double g) {
    const double r = std::sqrt(omega * omega + g * g);
    return {w - r, w, w + r};
}

} // namespace

TEST(Arrowhead, IsolatedThreeLevelSystemMatchesClosedForm) {
    const double om = 0.2;
    const double g = 0.1;
    const auto expected = three_level_eigenvalues(1.0, om, g);
    const auto dec = arrowhead::eigendecompose(1.0, {1.0, 1.0}, {om, g});
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(dec.values[k], expected[k], 1e-12);

    Eigen::Matrix3d m;
    m << 1.0, om, 0.0, om, 1.0, g, 0.0, g, 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(es.eigenvalues()[k], expected[k], 1e-12);
}

TEST(Arrowhead, DegenerateAndDecoupledSpokesDeflate) {
    const std::vector<double> d{0.0, 0.0, 0.0, 1.0, 2.0, 2.0};
    const std::vector<double> z{0.3, 0.0, 0.4, 0.5, 0.0, 0.0};
    const auto dec = arrowhead::eigendecompose(0.5, d, z);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(7, 7);
    m(0, 0) = 0.5;
    for (int k = 0; k < 6; ++k) {
        m(k + 1, k + 1) = d[k];
        m(0, k + 1) = m(k + 1, 0) = z[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    EXPECT_LT((dec.values - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((dec.vectors.transpose() * dec.vectors - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-14);
    const Eigen::MatrixXd rebuilt = dec.vectors * dec.values.asDiagonal() * dec.vectors.transpose();
    EXPECT_LT((rebuilt - m).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Eigendecompose, SideModesFarDetunedApproachThreeLevelSystem) {
    const auto p = validate_params({1.0, 0.2, 0.1, 10.0, 2});
    const auto spec = eigendecompose(build_hamiltonian(p));
    const auto expected = three_level_eigenvalues(1.0, 0.2, 0.1);
    // f = ω0 and ω0 ± √(Ω²+g²) sit in the middle; side modes at ω0 ± 10 shift them by O(g²/δω)
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(spec.eigenfrequencies[k + 1], expected[k], 2.0 * 0.01 / 10.0);
    EXPECT_NEAR(spec.eigenfrequencies[2], 1.0, 1e-14);
}

TEST(Eigendecompose, ZeroOmegaLeavesAtomEigenvector) {
    for (Solver solver : {Solver::Dense, Solver::Arrowhead}) {
        const auto spec = eigendecompose(build_hamiltonian(figure_params(0.0)), solver);
        Eigen::Index l;
        const double w = spec.atom_weights.maxCoeff(&l);
        EXPECT_NEAR(w, 1.0, 1e-14);
        EXPECT_NEAR(spec.eigenfrequencies[l], 1.0, 1e-14);
        EXPECT_NEAR(spec.atom_weights.sum() - w, 0.0, 1e-14);
    }
}

TEST(Eigendecompose, DenseInvariantsAtFigureParameters) {
    for (double om : {kG / 3.0, 5.0 * kG}) {
        const auto h = build_hamiltonian(figure_params(om));
        const auto spec = eigendecompose(h);
        EXPECT_LT(reconstruction_residual(h, spec), Tolerances::reconstruction);
        EXPECT_LT(orthonormality_defect(spec), Tolerances::orthonormality);
        EXPECT_NEAR(spec.atom_weights.sum(), 1.0, Tolerances::weight_sum);
        EXPECT_TRUE(std::is_sorted(spec.eigenfrequencies.begin(), spec.eigenfrequencies.end()));
        const Eigen::MatrixXd hd = h.dense();
        for (Eigen::Index l = 0; l < spec.dimension(); ++l)
            EXPECT_LT((hd * spec.eigenvectors.col(l) - spec.eigenfrequencies[l] * spec.eigenvectors.col(l))
                          .cwiseAbs()
                          .maxCoeff(),
                      1e-12);
    }
}

TEST(Eigendecompose, ArrowheadAgreesWithDense) {
    for (int n : {2, 10, 100, 400}) {
        for (double om : {0.0, kG / 3.0, kG / std::numbers::sqrt2, 5.0 * kG}) {
            const auto h = build_hamiltonian(figure_params(om, n));
            const auto dense = eigendecompose(h, Solver::Dense);
            const auto fast = eigendecompose(h, Solver::Arrowhead);
            EXPECT_LT((dense.detunings - fast.detunings).cwiseAbs().maxCoeff(), 1e-14) << n << " " << om;
            EXPECT_LT(orthonormality_defect(fast), Tolerances::orthonormality);
            EXPECT_LT(reconstruction_residual(h, fast), Tolerances::reconstruction);
            EXPECT_NEAR(fast.atom_weights.sum(), 1.0, Tolerances::weight_sum);
            // compare weight mass per eigenvalue cluster; vectors inside degenerate clusters are not unique
            EXPECT_NEAR(weight_within(fast, 1.0, 1e-9), weight_within(dense, 1.0, 1e-9), 1e-12);
            EXPECT_NEAR(weight_within(fast, 1.0, 5.0 * kG), weight_within(dense, 1.0, 5.0 * kG), 1e-12);
        }
    }
}

TEST(Eigendecompose, OrthonormalAtThousandModes) {
    const auto h = build_hamiltonian(figure_params(kG / 3.0, 1000));
    for (Solver solver : {Solver::Dense, Solver::Arrowhead}) {
        const auto spec = eigendecompose(h, solver);
        EXPECT_LT(orthonormality_defect(spec), Tolerances::orthonormality);
        EXPECT_NEAR(spec.atom_weights.sum(), 1.0, Tolerances::weight_sum);
    }
}

TEST(PropagateSpectral, IdentityAtTimeZero) {
    const auto p = figure_params(kG / 3.0);
    const auto spec = eigendecompose(build_hamiltonian(p));
    const auto psi0 = initial_state(p);
    EXPECT_EQ((propagate_spectral(spec, psi0, 0.0).vector() - psi0.vector()).cwiseAbs().maxCoeff(), 0.0);
    // a tiny nonzero time goes through the full expansion
    EXPECT_LT((propagate_spectral(spec, psi0, 1e-300).vector() - psi0.vector()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PropagateSpectral, RabiOscillationWithoutRing) {
    // g -> 0 leaves the two-level Rabi problem: |C_s|^2 = cos^2(Omega t)
    const double om = 0.003;
    const auto p = validate_params({1.0, om, 1e-300, 0.002, 10});
    const auto spec = eigendecompose(build_hamiltonian(p));
    const auto psi0 = initial_state(p);
    for (double t : {1.0, 100.0, 523.6, 2000.0, 6283.0}) {
        const auto psi = propagate_spectral(spec, psi0, t);
        EXPECT_NEAR(std::norm(psi.c_sigma()), std::pow(std::cos(om * t), 2), 1e-10) << t;
    }
}

TEST(PropagateSpectral, UnitarityAndTimeReversal) {
    const auto p = figure_params(5.0 * kG);
    const auto spec = eigendecompose(build_hamiltonian(p));
    const auto psi0 = initial_state(p);
    for (double t : {10.0, 1000.0, p.bypass_time(), 2.0 * p.bypass_time()}) {
        for (Frame frame : {Frame::Lab, Frame::Rotating}) {
            const auto psi = propagate_spectral(spec, psi0, t, frame);
            EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-10);
            const auto back = propagate_spectral(spec, psi, -t, frame);
            EXPECT_LT((back.vector() - psi0.vector()).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(PropagateSpectral, LabAndRotatingFramesDifferByCarrier) {
    const auto p = figure_params(kG / 3.0);
    const auto spec = eigendecompose(build_hamiltonian(p));
    const auto psi0 = initial_state(p);
    const double t = 777.0;
    const auto lab = propagate_spectral(spec, psi0, t, Frame::Lab);
    const auto rot = propagate_spectral(spec, psi0, t, Frame::Rotating);
    EXPECT_LT((lab.vector() - rot.vector() * std::polar(1.0, -t)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PropagateSpectral, DimensionMismatch) {
    const auto spec = eigendecompose(build_hamiltonian(figure_params(0.001, 10)));
    try {
        propagate_spectral(spec, initial_state(figure_params(0.001, 12)), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(ModeWeightDistribution, SortedAndComplete) {
    const auto dist = mode_weight_distribution(eigendecompose(build_hamiltonian(figure_params(kG / 3.0))));
    double sum = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        sum += dist[k].weight;
        if (k > 0)
            EXPECT_LE(dist[k - 1].frequency, dist[k].frequency);
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(ModeWeightDistribution, DecoupledAtomIsSingleImpulse) {
    const auto dist = mode_weight_distribution(eigendecompose(build_hamiltonian(figure_params(0.0))));
    int carrying = 0;
    for (const auto& w : dist)
        if (w.weight > 1e-12) {
            ++carrying;
            EXPECT_NEAR(w.frequency, 1.0, 1e-14);
            EXPECT_NEAR(w.weight, 1.0, 1e-14);
        }
    EXPECT_EQ(carrying, 1);
}

TEST(ModeWeightDistribution, WeakCouplingNarrowPeak) {
    // The combination g|e> - Omega|1_0> decouples from the cavity at exactly
    // omega0, carrying atom weight g^2 / (g^2 + Omega^2) = 0.9 at Omega = g/3.
    const auto p = figure_params(kG / 3.0);
    const auto spec = eigendecompose(build_hamiltonian(p));
    EXPECT_NEAR(weight_within(spec, 1.0, 1e-12), 0.9, 1e-12);
    EXPECT_GE(weight_within(spec, 1.0, 5.0 * p.effective_decay()), 0.9 - Tolerances::weight_sum);
}

TEST(ModeWeightDistribution, StrongCouplingSpreadsOverBand) {
    const double om = 5.0 * kG;
    const auto p = figure_params(om);
    const auto spec = eigendecompose(build_hamiltonian(p));
    EXPECT_LT(spec.atom_weights.maxCoeff(), 0.25);
    // the weak-coupling peak window now holds only the decoupled vector, weight g^2/(g^2+Omega^2) = 1/26
    const double narrow = 5.0 * figure_params(kG / 3.0).effective_decay();
    EXPECT_NEAR(weight_within(spec, 1.0, narrow), 1.0 / 26.0, 1e-12);
    EXPECT_GT(weight_within(spec, 1.0, 2.0 * om), 0.9);
}
