// constants.hpp: numerical tolerances and defaults shared across modules

#pragma once

#include <cstddef>

namespace ringqed {

struct Tolerances {
    // eigensolver reconstruction, relative to max |H_ij|
    static constexpr double reconstruction = 1e-10;
    static constexpr double orthonormality = 1e-10;
    static constexpr double weight_sum = 1e-10;
    // norm drift allowed at stored snapshots
    static constexpr double snapshot_norm = 1e-8;
    static constexpr double initial_state = 1e-12;
};

struct Defaults {
    static constexpr double omega0 = 1.0;
    static constexpr double g = 0.003;
    static constexpr double mode_spacing = 0.002;
    static constexpr int n_modes = 100;
    static constexpr double omega_over_g = 1.0 / 3.0;

    static constexpr double t_max_over_tb = 2.5;
    static constexpr int dt_divisor = 5000;          // dt = T_b / dt_divisor
    static constexpr int rk4_dt_divisor = 20000;
    static constexpr std::size_t snapshot_stride = 100;
    static constexpr std::size_t max_grid_points = 5'000'000;

    static constexpr double phase_floor = 1e-6;
    static constexpr double revival_single = 0.3;
    static constexpr double revival_doubled = 0.9;
    static constexpr double revival_separation_tb = 0.2;
    static constexpr double phase_band = 0.05;

    static constexpr int sweep_points = 40;
    static constexpr double sweep_min_over_g = 0.1;
    static constexpr double sweep_max_over_g = 3.0;
};

} // namespace ringqed
