// csv.hpp: CSV and JSON writers for trajectories, sweeps, spectra

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringqed/analysis.hpp"
#include "ringqed/dynamics.hpp"
#include "ringqed/error.hpp"
#include "ringqed/io/format.hpp"
#include "ringqed/spectral.hpp"
#include "ringqed/sweep.hpp"

namespace ringqed::io {

/// Writes `content` to `path` via a sibling temp file and a rename, so a
/// reader never sees a half-written file.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.close();
        if (!f)
            throw Error(ErrorKind::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot move output into place at " + path.string());
    }
}

inline std::string trajectory_csv(const Trajectory& traj, const ObservableSeries& series) {
    if (series.size() != traj.c_sigma.size())
        throw Error(ErrorKind::DimensionMismatch, "series and trajectory lengths differ");
    std::string s = "t,re_c_sigma,im_c_sigma,re_c_a,im_c_a,pop_sigma,pop_cavity,energy_flow,phase_diff,phase_valid\n";
    s.reserve(s.size() + series.size() * 160);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const complex cs = traj.c_sigma[i];
        const complex ca = traj.c_cavity[i];
        s += format_number(series.times[i]);
        for (double v : {cs.real(), cs.imag(), ca.real(), ca.imag(), series.pop_sigma[i], series.pop_cavity[i],
                         series.energy_flow[i]}) {
            s += ',';
            s += format_number(v);
        }
        s += ',';
        if (series.phase_valid[i])
            s += format_number(series.phase_diff[i]);
        s += series.phase_valid[i] ? ",true\n" : ",false\n";
    }
    return s;
}

/// One row per grid point; amplitudes as stored in the trajectory.
inline void write_trajectory_csv(const Trajectory& traj, const ObservableSeries& series,
                                 const std::filesystem::path& path) {
    write_file(path, trajectory_csv(traj, series));
}

inline std::string sweep_csv(const SweepReport& report) {
    std::string s = "omega,omega_over_g,avg_phase_Tb,avg_phase_2Tb,classification,gamma_prime_fit,gamma_prime_pred\n";
    for (const auto& r : report.rows) {
        s += format_number(r.omega) + ',' + format_number(r.omega_over_g) + ',' + format_number(r.avg_phase_Tb) + ',' +
             format_number(r.avg_phase_2Tb) + ',' + to_string(r.classification) + ',' +
             format_number(r.gamma_prime_fit) + ',' + format_number(r.gamma_prime_pred) + '\n';
    }
    return s;
}

inline nlohmann::json sweep_summary(const SweepReport& report) {
    const auto& p = report.params;
    const auto cc = critical_coupling(p);
    nlohmann::json j;
    j["g"] = p.g();
    j["mode_spacing"] = p.mode_spacing();
    j["n_modes"] = p.n_modes();
    j["bypass_time"] = p.bypass_time();
    j["t_max"] = report.t_max;
    j["band"] = report.band;
    j["points"] = report.rows.size();
    j["critical_coupling"] = cc.omega;
    j["critical_coupling_over_g"] = cc.omega / p.g();
    j["transition_estimate"] = report.transition_estimate ? nlohmann::json(*report.transition_estimate) : nlohmann::json(nullptr);
    j["transition_estimate_over_g"] =
        report.transition_estimate ? nlohmann::json(*report.transition_estimate / p.g()) : nlohmann::json(nullptr);
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& r : report.rows)
        if (!r.ok())
            failures.push_back({{"omega", r.omega}, {"error", *r.failure}});
    j["failures"] = failures;
    return j;
}

/// Sweep table as CSV plus a JSON summary with the transition estimate and
/// the critical coupling g/sqrt(2).
inline void write_sweep_report(const SweepReport& report, const std::filesystem::path& csv_path,
                               const std::filesystem::path& json_path) {
    if (report.rows.empty())
        throw Error(ErrorKind::Precondition, "sweep report is empty");
    write_file(csv_path, sweep_csv(report));
    write_file(json_path, sweep_summary(report).dump(2) + "\n");
}

inline std::string weight_csv(const std::vector<WeightPoint>& points) {
    std::string s = "frequency,weight\n";
    for (const auto& w : points)
        s += format_number(w.frequency) + ',' + format_number(w.weight) + '\n';
    return s;
}

inline void write_weight_csv(const std::vector<WeightPoint>& points, const std::filesystem::path& path) {
    write_file(path, weight_csv(points));
}

inline void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path) {
    std::string s = "n_from,n_to,sup_deviation\n";
    for (const auto& r : rows)
        s += std::to_string(r.n_from) + ',' + std::to_string(r.n_to) + ',' + format_number(r.sup_deviation) + '\n';
    write_file(path, s);
}

} // namespace ringqed::io
