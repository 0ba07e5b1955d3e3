#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ringqed/analysis.hpp"
#include "test_fixtures.hpp"

using namespace ringqed;
using ringqed::test::figure_params;
using ringqed::test::kG;

namespace {

// Independent RK4 integration of the reduced two-mode equations (rotating frame).
std::pair<complex, complex> reduced_rk4(double omega, double gamma, double t, int steps) {
    const complex i{0.0, 1.0};
    auto f = [&](complex s, complex a) {
        return std::pair<complex, complex>{-i * omega * a, -gamma * a - i * omega * s};
    };
    complex s = 1.0, a = 0.0;
    const double h = t / steps;
    for (int k = 0; k < steps; ++k) {
        auto [k1s, k1a] = f(s, a);
        auto [k2s, k2a] = f(s + 0.5 * h * k1s, a + 0.5 * h * k1a);
        auto [k3s, k3a] = f(s + 0.5 * h * k2s, a + 0.5 * h * k2a);
        auto [k4s, k4a] = f(s + h * k3s, a + h * k3a);
        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    }
    return {s, a};
}

ObservableSeries series_from(const std::vector<double>& t, const std::vector<double>& pop, double tb) {
    ObservableSeries s;
    s.bypass_time = tb;
    s.times = t;
    s.pop_sigma = pop;
    s.pop_cavity.assign(t.size(), 0.0);
    s.energy_flow.assign(t.size(), 0.0);
    s.phase_diff.assign(t.size(), std::numeric_limits<double>::quiet_NaN());
    s.phase_valid.assign(t.size(), false);
    return s;
}

} // namespace

TEST(MarkovParameters, FigureValues) {
    const auto mp = markov_parameters(figure_params(kG / 3.0));
    EXPECT_NEAR(mp.gamma, 0.014137166941154069, 1e-15);
    EXPECT_NEAR(mp.gamma_prime * figure_params(kG / 3.0).bypass_time(), 2.0 / 9.0, 1e-12);
    EXPECT_FALSE(mp.underdamped);
    EXPECT_NEAR(mp.lambda_plus.real() + mp.lambda_minus.real(), -mp.gamma, 1e-15);
    EXPECT_NEAR(mp.lambda_plus.imag(), -1.0, 0.0);
    // Omega << gamma: -Re lambda_- tends to Omega^2 / gamma
    EXPECT_NEAR(-mp.lambda_minus.real() / (std::pow(kG / 3.0, 2) / mp.gamma), 1.0, 0.01);
}

TEST(MarkovParameters, StrongCouplingIsUnderdamped) {
    const auto mp = markov_parameters(figure_params(5.0 * kG));
    EXPECT_TRUE(mp.underdamped);
    EXPECT_NEAR(mp.lambda_plus.real(), -mp.gamma / 2, 1e-15);
    EXPECT_NEAR(mp.lambda_minus.real(), -mp.gamma / 2, 1e-15);
}

TEST(MarkovParameters, CriticalDamping) {
    const double gamma = figure_params(0.0).markov_gamma();
    const auto mp = markov_parameters(figure_params(gamma / 2.0));
    EXPECT_TRUE(mp.critical);
    EXPECT_EQ(mp.lambda_plus, mp.lambda_minus);
    EXPECT_NEAR(mp.lambda_plus.real(), -gamma / 2.0, 1e-16);
    EXPECT_EQ(mp.lambda_plus.imag(), -1.0);
}

TEST(MarkovSigmaAmplitude, UnitAtTimeZero) {
    for (double om : {0.0, kG / 10.0, kG / 3.0, 5.0 * kG}) {
        const auto mp = markov_parameters(figure_params(om));
        EXPECT_EQ(markov_sigma_amplitude(mp, 0.0), complex(1.0, 0.0));
    }
}

TEST(MarkovSigmaAmplitude, SlowDecayLaw) {
    const auto p = figure_params(kG / 10.0);
    const auto mp = markov_parameters(p);
    const double t = 1.0 / mp.gamma_prime;
    // |C_s(1/gamma')| against e^{-1}; the omitted fast term and the O(Omega^2/gamma^2)
    // correction to the rate each contribute below 1e-3 here
    EXPECT_NEAR(std::abs(markov_sigma_amplitude(mp, t)), std::exp(-1.0), 2e-3);
}

TEST(MarkovSigmaAmplitude, MatchesIndependentIntegration) {
    for (double om : {kG / 10.0, kG / 3.0, kG / std::numbers::sqrt2, 5.0 * kG}) {
        const auto p = figure_params(om);
        const auto mp = markov_parameters(p);
        for (double t : {50.0, 500.0, 2000.0}) {
            const auto [s, a] = reduced_rk4(om, mp.gamma, t, 20000);
            const complex carrier = std::polar(1.0, -t);
            EXPECT_LT(std::abs(markov_sigma_amplitude(mp, t) - s * carrier), 1e-10) << om << " " << t;
            const auto traj = markov_trajectory(p, t, t / 4);
            EXPECT_LT(std::abs(traj.c_sigma.back() - s), 1e-10);
            EXPECT_LT(std::abs(traj.c_cavity.back() - a), 1e-10);
        }
    }
}

TEST(MarkovSigmaAmplitude, CriticalLimitIsContinuous) {
    const double gamma = figure_params(0.0).markov_gamma();
    const auto crit = markov_parameters(figure_params(gamma / 2.0));
    const auto near = markov_parameters(figure_params(gamma / 2.0 * (1.0 + 1e-6)));
    for (double t : {10.0, 100.0, 1000.0})
        EXPECT_NEAR(std::abs(markov_sigma_amplitude(crit, t) - markov_sigma_amplitude(near, t)), 0.0, 1e-5);
    const auto [s, a] = reduced_rk4(gamma / 2.0, gamma, 300.0, 20000);
    EXPECT_LT(std::abs(markov_sigma_amplitude(crit, 300.0) - s * std::polar(1.0, -300.0)), 1e-10);
    const auto traj = markov_trajectory(figure_params(gamma / 2.0), 300.0, 100.0);
    EXPECT_LT(std::abs(traj.c_cavity.back() - a), 1e-10);
}

TEST(MarkovTrajectory, InitialConditionAndResidual) {
    for (double om : {kG / 3.0, 5.0 * kG}) {
        const auto p = figure_params(om);
        const double gamma = p.markov_gamma();
        const double dt = 1e-3 / gamma;
        const auto traj = markov_trajectory(p, 2000 * dt, dt);
        EXPECT_EQ(traj.c_sigma[0], complex(1.0));
        EXPECT_EQ(traj.c_cavity[0], complex(0.0));
        const complex i{0.0, 1.0};
        double worst = 0.0;
        double prev_norm = 1.0;
        for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
            const complex ds = (traj.c_sigma[k + 1] - traj.c_sigma[k - 1]) / (2.0 * dt);
            const complex da = (traj.c_cavity[k + 1] - traj.c_cavity[k - 1]) / (2.0 * dt);
            worst = std::max(worst, std::abs(ds + i * om * traj.c_cavity[k]));
            worst = std::max(worst, std::abs(da + gamma * traj.c_cavity[k] + i * om * traj.c_sigma[k]));
            const double norm = std::norm(traj.c_sigma[k]) + std::norm(traj.c_cavity[k]);
            EXPECT_LE(norm, prev_norm + 1e-15);
            prev_norm = norm;
        }
        EXPECT_LT(worst, 1e-6 * gamma);
    }
}

TEST(MarkovTrajectory, AgreesWithFullModelBeforeFirstBypass) {
    {
        const auto p = figure_params(kG / 3.0);
        const double tb = p.bypass_time();
        const auto full = compute_observables(evolve_trajectory(p, 0.9 * tb, tb / 5000));
        const auto red = compute_observables(markov_trajectory(p, 0.9 * tb, tb / 5000));
        double worst = 0.0;
        for (std::size_t i = 0; i < full.size(); ++i)
            worst = std::max(worst, std::abs(full.pop_sigma[i] - red.pop_sigma[i]));
        EXPECT_LT(worst, 0.05);
    }
    {
        const auto p = figure_params(5.0 * kG);
        const double tb = p.bypass_time();
        const auto full = compute_observables(evolve_trajectory(p, 0.1 * tb, tb / 5000));
        const auto red = compute_observables(markov_trajectory(p, 0.1 * tb, tb / 5000));
        double worst_sigma = 0.0, worst_cavity = 0.0;
        for (std::size_t i = 0; i < full.size(); ++i) {
            worst_sigma = std::max(worst_sigma, std::abs(full.pop_sigma[i] - red.pop_sigma[i]));
            worst_cavity = std::max(worst_cavity, std::abs(full.pop_cavity[i] - red.pop_cavity[i]));
        }
        // independent numpy/expm comparison: 0.02792 and 0.02881
        EXPECT_NEAR(worst_sigma, 0.02792, 5e-4);
        EXPECT_NEAR(worst_cavity, 0.02881, 5e-4);
    }
}

TEST(FitDecayRate, ExactExponential) {
    std::vector<double> t, pop;
    for (int k = 0; k <= 1000; ++k) {
        t.push_back(k * 2.0);
        pop.push_back(std::exp(-2.0 * 0.001 * t.back()));
    }
    const auto s = series_from(t, pop, 2000.0);
    EXPECT_NEAR(fit_decay_rate(s, {0.0, 2000.0}), 0.001, 1e-9);
}

TEST(FitDecayRate, EnvelopeOfOscillatingAmplitude) {
    std::vector<double> t, pop;
    for (int k = 0; k <= 20000; ++k) {
        t.push_back(k * 0.1);
        const double c = std::exp(-0.002 * t.back()) * (0.8 + 0.2 * std::cos(0.3 * t.back()));
        pop.push_back(c * c);
    }
    const auto s = series_from(t, pop, 2000.0);
    EXPECT_NEAR(fit_decay_rate(s, {0.0, 2000.0}), 0.002, 1e-6);
}

TEST(FitDecayRate, FullModelWeakCoupling) {
    for (double om : {kG / 10.0, kG / 5.0, kG / 3.0}) {
        const auto p = figure_params(om);
        const double tb = p.bypass_time();
        const auto s = compute_observables(evolve_trajectory(p, tb, tb / 5000));
        const double rate = fit_decay_rate(s, {0.0, 0.8 * tb});
        EXPECT_LT(std::abs(rate / p.effective_decay() - 1.0), 0.2) << om;
    }
}

TEST(FitDecayRate, NoDecayWithoutCoupling) {
    const auto p = figure_params(0.0);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, tb, tb / 1000));
    EXPECT_NEAR(fit_decay_rate(s, {0.0, 0.8 * tb}), 0.0, 1e-9);
}

TEST(FitDecayRate, Errors) {
    const auto s = series_from({0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, 0.0, 0.2}, 10.0);
    auto kind = [&](TimeWindow w) {
        try {
            fit_decay_rate(s, w);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::IoError;
    };
    EXPECT_EQ(kind({0.1, 0.9}), ErrorKind::EmptyWindow);
    EXPECT_EQ(kind({0.0, 3.0}), ErrorKind::NonPositiveAmplitude);
    EXPECT_EQ(kind({0.0, 20.0}), ErrorKind::Precondition);
}

TEST(AveragedPhaseDifference, RabiPeriodAveragesToZero) {
    const double om = 0.003;
    const auto p = validate_params({1.0, om, 1e-300, 0.002, 10});
    const double period = std::numbers::pi / om;
    const auto s = compute_observables(evolve_trajectory(p, period, period / 10000));
    const auto avg = averaged_phase_difference(s, period);
    EXPECT_NEAR(avg.mean, 0.0, 1e-3);
    EXPECT_LT(avg.masked_fraction, 0.01);
}

TEST(AveragedPhaseDifference, WeakCouplingOneVersusTwoBypasses) {
    const auto p = figure_params(kG / 3.0);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, 2.0 * tb, tb / 5000));
    const auto avg = phase_averages(s);
    EXPECT_LT(std::abs(avg.avg_over_2Tb), 0.05);
    EXPECT_GT(std::abs(avg.avg_over_Tb), 0.2);
    EXPECT_NEAR(avg.avg_over_Tb, -std::numbers::pi / 2, 1e-9);
    EXPECT_LT(avg.masked_fraction, 0.5);
}

TEST(AveragedPhaseDifference, StrongCouplingRegression) {
    // Frozen from an independent numpy run (dt = T_b/5000, floor 1e-6): the
    // one-bypass average at Omega = 5g is -0.2217 rad, not below 0.05 rad.
    const auto p = figure_params(5.0 * kG);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, 2.0 * tb, tb / 5000));
    const auto avg = phase_averages(s);
    EXPECT_NEAR(avg.avg_over_Tb, -0.22168, 2e-3);
    EXPECT_NEAR(avg.avg_over_2Tb, -0.17492, 2e-3);
}

TEST(AveragedPhaseDifference, Errors) {
    const auto p = figure_params(0.0);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, tb, tb / 100));
    try {
        averaged_phase_difference(s, tb);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AllMasked);
    }
    try {
        averaged_phase_difference(s, 2.0 * tb);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HorizonTooShort);
    }
}

TEST(DetectRevivals, StrongCouplingSingle) {
    const auto p = figure_params(5.0 * kG);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, 2.5 * tb, tb / 5000));
    const auto rep = detect_revivals(s, 0.3);
    ASSERT_TRUE(rep.poincare_time.has_value());
    // first revival peaks 5.8% after T_b (independent numpy run: 1.0584 T_b)
    EXPECT_NEAR(*rep.poincare_time / tb, 1.0584, 5e-4);
    EXPECT_EQ(rep.classification, Recurrence::Single);
    EXPECT_TRUE(std::is_sorted(rep.revival_times.begin(), rep.revival_times.end()));
}

TEST(DetectRevivals, WeakCouplingDoubled) {
    const auto p = figure_params(kG / 3.0);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, 2.5 * tb, tb / 5000));
    const auto rep = detect_revivals(s, 0.9);
    ASSERT_TRUE(rep.poincare_time.has_value());
    EXPECT_LT(std::abs(*rep.poincare_time / (2.0 * tb) - 1.0), 0.05);
    EXPECT_EQ(rep.classification, Recurrence::Doubled);
    EXPECT_EQ(classify_recurrence(s), Recurrence::Doubled);
}

TEST(DetectRevivals, NoCollapseIsIndeterminate) {
    const auto p = figure_params(0.0);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, 2.5 * tb, tb / 1000));
    const auto rep = detect_revivals(s, 0.9);
    EXPECT_TRUE(rep.revival_times.empty());
    EXPECT_EQ(rep.classification, Recurrence::Indeterminate);
}

TEST(DetectRevivals, MergesCloseMaximaKeepingHigher) {
    std::vector<double> t, pop;
    const double tb = 100.0;
    for (int k = 0; k <= 300; ++k) {
        t.push_back(k);
        const double x = k;
        double v = 0.05;
        v += 0.6 * std::exp(-std::pow((x - 100.0) / 2.0, 2));
        v += 0.8 * std::exp(-std::pow((x - 110.0) / 2.0, 2)); // within 0.2 T_b of the first
        v += 0.7 * std::exp(-std::pow((x - 200.0) / 2.0, 2));
        pop.push_back(v);
    }
    const auto rep = detect_revivals(series_from(t, pop, tb), 0.3);
    ASSERT_EQ(rep.revival_times.size(), 2u);
    EXPECT_EQ(rep.revival_times[0], 110.0);
    EXPECT_EQ(rep.revival_times[1], 200.0);
    EXPECT_EQ(rep.classification, Recurrence::Single);
}

TEST(DetectRevivals, Errors) {
    const auto p = figure_params(kG / 3.0);
    const double tb = p.bypass_time();
    const auto s = compute_observables(evolve_trajectory(p, 2.0 * tb, tb / 100));
    EXPECT_THROW(detect_revivals(s, 0.9), Error);
    const auto longer = compute_observables(evolve_trajectory(p, 2.5 * tb, tb / 100));
    EXPECT_THROW(detect_revivals(longer, 1.0), Error);
    EXPECT_THROW(detect_revivals(longer, 0.0), Error);
}

TEST(CriticalCoupling, Values) {
    const auto c = critical_coupling(figure_params(0.001));
    EXPECT_NEAR(c.omega, 0.0021213203435596424, 1e-18);
    EXPECT_NEAR(c.decay_times_bypass, 1.0, 1e-15);
    EXPECT_NEAR(c.decay_over_spacing, 1.0, 1e-15);
    const auto doubled = critical_coupling(validate_params({1.0, 0.001, 0.006, 0.002, 100}));
    EXPECT_NEAR(doubled.omega, 2.0 * c.omega, 1e-18);
    EXPECT_NEAR(figure_params(c.omega).effective_decay() * figure_params(c.omega).bypass_time(), 1.0, 1e-14);
}
