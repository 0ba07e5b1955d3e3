// config.hpp: run configuration: `key = value` text plus flag overrides

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "ringqed/constants.hpp"
#include "ringqed/core_model.hpp"
#include "ringqed/error.hpp"
#include "ringqed/io/format.hpp"

namespace ringqed::io {

enum class RunKind { Simulate, Markov, Spectrum, Sweep, Converge };

inline const char* to_string(RunKind k) {
    switch (k) {
    case RunKind::Simulate: return "simulate";
    case RunKind::Markov: return "markov";
    case RunKind::Spectrum: return "spectrum";
    case RunKind::Sweep: return "sweep";
    case RunKind::Converge: return "converge";
    }
    return "simulate";
}

inline std::optional<RunKind> parse_run_kind(std::string_view s) {
    for (RunKind k : {RunKind::Simulate, RunKind::Markov, RunKind::Spectrum, RunKind::Sweep, RunKind::Converge})
        if (s == to_string(k))
            return k;
    return std::nullopt;
}

/// Everything a CLI run needs. Frequencies are in units of omega0 = 1, the
/// horizon in units of T_b, and dt = T_b / dt_div.
struct RunConfig {
    RunKind kind{RunKind::Simulate};
    RawParams physical{Defaults::omega0, Defaults::g * Defaults::omega_over_g, Defaults::g, Defaults::mode_spacing,
                       Defaults::n_modes};
    double t_max_tb{Defaults::t_max_over_tb};
    int dt_div{Defaults::dt_divisor};
    double revival_single{Defaults::revival_single};
    double revival_doubled{Defaults::revival_doubled};
    double phase_band{Defaults::phase_band};
    double mask_eps{Defaults::phase_floor};
    int sweep_points{Defaults::sweep_points};
    double sweep_min_over_g{Defaults::sweep_min_over_g};
    double sweep_max_over_g{Defaults::sweep_max_over_g};
    std::vector<int> converge_n{50, 100, 200};
    std::string out;
    std::string plot;
    int threads{1};

    bool operator==(const RunConfig& o) const {
        const auto& a = physical;
        const auto& b = o.physical;
        return kind == o.kind && a.omega0 == b.omega0 && a.omega == b.omega && a.g == b.g &&
               a.mode_spacing == b.mode_spacing && a.n_modes == b.n_modes && t_max_tb == o.t_max_tb &&
               dt_div == o.dt_div && revival_single == o.revival_single && revival_doubled == o.revival_doubled &&
               phase_band == o.phase_band && mask_eps == o.mask_eps && sweep_points == o.sweep_points &&
               sweep_min_over_g == o.sweep_min_over_g && sweep_max_over_g == o.sweep_max_over_g &&
               converge_n == o.converge_n && out == o.out && plot == o.plot && threads == o.threads;
    }
};

namespace detail {

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "kind",         "omega",           "omega_over_g",     "g",          "dw",
        "n_modes",      "t_max_tb",        "dt_div",           "revival_single", "revival_doubled",
        "phase_band",   "mask_eps",        "sweep_points",     "sweep_min_over_g", "sweep_max_over_g",
        "converge_n",   "out",             "plot",             "threads",
    };
    return keys;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// "--omega-over-g" and "omega_over_g" name the same key.
inline std::string normalize_key(std::string_view raw) {
    std::string key(raw);
    while (!key.empty() && key.front() == '-')
        key.erase(key.begin());
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

struct Entry {
    std::string value;
    std::string origin; // "line N" or "flag --x"
};

/// Later entries win; omega and omega_over_g displace each other.
inline void assign(std::map<std::string, Entry>& m, const std::string& key, Entry e) {
    if (key == "omega")
        m.erase("omega_over_g");
    else if (key == "omega_over_g")
        m.erase("omega");
    m[key] = std::move(e);
}

inline double to_double(const Entry& e, const std::string& key) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || e.value.empty())
        throw Error(ErrorKind::ParseError, e.origin + ": '" + key + "' expects a number, got '" + e.value + "'");
    return v;
}

inline int to_int(const Entry& e, const std::string& key) {
    int v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || e.value.empty())
        throw Error(ErrorKind::ParseError, e.origin + ": '" + key + "' expects an integer, got '" + e.value + "'");
    return v;
}

inline std::vector<int> to_int_list(const Entry& e, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_int({trim(item), e.origin}, key));
    return out;
}

inline void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok)
        throw Error(ErrorKind::ValidationError, field + ": " + why);
}

} // namespace detail

/// Checks every field; throws ValidationError naming the first bad one.
inline void validate_config(const RunConfig& c) {
    try {
        validate_params(c.physical);
    } catch (const Error& e) {
        throw Error(ErrorKind::ValidationError, e.detail());
    }
    using detail::require;
    require(c.t_max_tb > 0.0 && std::isfinite(c.t_max_tb), "t_max_tb", "must be positive");
    require(c.dt_div >= 1, "dt_div", "must be at least 1");
    require(c.revival_single > 0.0 && c.revival_single < 1.0, "revival_single", "must lie in (0, 1)");
    require(c.revival_doubled > 0.0 && c.revival_doubled < 1.0, "revival_doubled", "must lie in (0, 1)");
    require(c.phase_band > 0.0, "phase_band", "must be positive");
    require(c.mask_eps > 0.0, "mask_eps", "must be positive");
    require(c.sweep_points >= 1, "sweep_points", "must be at least 1");
    require(c.sweep_min_over_g > 0.0 && c.sweep_max_over_g >= c.sweep_min_over_g, "sweep_min_over_g",
            "need 0 < sweep_min_over_g <= sweep_max_over_g");
    require(!c.converge_n.empty(), "converge_n", "must list at least one mode count");
    for (std::size_t i = 0; i < c.converge_n.size(); ++i) {
        require(c.converge_n[i] >= 2 && c.converge_n[i] % 2 == 0, "converge_n", "mode counts must be even and >= 2");
        if (i > 0)
            require(c.converge_n[i] >= c.converge_n[i - 1], "converge_n", "mode counts must be ascending");
    }
    require(c.threads >= 1, "threads", "must be at least 1");
}

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines (`#` starts a comment), then applies
/// `overrides` (flag name or key, value) on top. Later entries win, and
/// `omega` / `omega_over_g` displace each other; `omega_over_g` is resolved
/// against the final g. Unknown keys are rejected.
inline RunConfig parse_config(std::string_view text, const Overrides& overrides = {}) {
    using detail::Entry;
    std::map<std::string, Entry> file_entries;
    std::map<std::string, Entry> flag_entries;
    const auto& keys = detail::known_keys();

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::string body = detail::trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        if (key.empty())
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": missing key");
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw Error(ErrorKind::UnknownKey, key + " (line " + std::to_string(line_no) + ")");
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        detail::assign(file_entries, key, {value, "line " + std::to_string(line_no)});
    }
    for (const auto& [name, value] : overrides) {
        const std::string key = detail::normalize_key(name);
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw Error(ErrorKind::UnknownKey, name);
        detail::assign(flag_entries, key, {value, "flag --" + name});
    }

    // flags shadow the file; the two ways of giving Omega shadow each other as a pair
    std::map<std::string, Entry> merged = file_entries;
    if (flag_entries.count("omega") || flag_entries.count("omega_over_g")) {
        merged.erase("omega");
        merged.erase("omega_over_g");
    }
    for (const auto& [k, e] : flag_entries)
        merged[k] = e;

    RunConfig c;
    auto get = [&](const char* key) -> const Entry* {
        const auto it = merged.find(key);
        return it == merged.end() ? nullptr : &it->second;
    };
    try {
        if (const auto* e = get("kind")) {
            const auto k = parse_run_kind(e->value);
            if (!k)
                throw Error(ErrorKind::ValidationError, "kind: unknown run kind '" + e->value + "'");
            c.kind = *k;
        }
        if (const auto* e = get("g"))
            c.physical.g = detail::to_double(*e, "g");
        if (const auto* e = get("dw"))
            c.physical.mode_spacing = detail::to_double(*e, "dw");
        if (const auto* e = get("n_modes"))
            c.physical.n_modes = detail::to_int(*e, "n_modes");
        c.physical.omega = c.physical.g * Defaults::omega_over_g;
        if (const auto* e = get("omega"))
            c.physical.omega = detail::to_double(*e, "omega");
        if (const auto* e = get("omega_over_g"))
            c.physical.omega = detail::to_double(*e, "omega_over_g") * c.physical.g;
        if (const auto* e = get("t_max_tb"))
            c.t_max_tb = detail::to_double(*e, "t_max_tb");
        if (const auto* e = get("dt_div"))
            c.dt_div = detail::to_int(*e, "dt_div");
        if (const auto* e = get("revival_single"))
            c.revival_single = detail::to_double(*e, "revival_single");
        if (const auto* e = get("revival_doubled"))
            c.revival_doubled = detail::to_double(*e, "revival_doubled");
        if (const auto* e = get("phase_band"))
            c.phase_band = detail::to_double(*e, "phase_band");
        if (const auto* e = get("mask_eps"))
            c.mask_eps = detail::to_double(*e, "mask_eps");
        if (const auto* e = get("sweep_points"))
            c.sweep_points = detail::to_int(*e, "sweep_points");
        if (const auto* e = get("sweep_min_over_g"))
            c.sweep_min_over_g = detail::to_double(*e, "sweep_min_over_g");
        if (const auto* e = get("sweep_max_over_g"))
            c.sweep_max_over_g = detail::to_double(*e, "sweep_max_over_g");
        if (const auto* e = get("converge_n"))
            c.converge_n = detail::to_int_list(*e, "converge_n");
        if (const auto* e = get("out"))
            c.out = e->value;
        if (const auto* e = get("plot"))
            c.plot = e->value;
        if (const auto* e = get("threads"))
            c.threads = detail::to_int(*e, "threads");
    } catch (const Error& e) {
        // malformed flag values are validation errors; malformed file lines are parse errors
        if (e.kind() == ErrorKind::ParseError && e.detail().rfind("flag", 0) == 0)
            throw Error(ErrorKind::ValidationError, e.detail());
        throw;
    }
    validate_config(c);
    return c;
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& c) {
    std::string s;
    auto put = [&](const char* key, const std::string& value) {
        s += key;
        s += " = ";
        s += value;
        s += '\n';
    };
    put("kind", to_string(c.kind));
    put("omega", format_number(c.physical.omega));
    put("g", format_number(c.physical.g));
    put("dw", format_number(c.physical.mode_spacing));
    put("n_modes", std::to_string(c.physical.n_modes));
    put("t_max_tb", format_number(c.t_max_tb));
    put("dt_div", std::to_string(c.dt_div));
    put("revival_single", format_number(c.revival_single));
    put("revival_doubled", format_number(c.revival_doubled));
    put("phase_band", format_number(c.phase_band));
    put("mask_eps", format_number(c.mask_eps));
    put("sweep_points", std::to_string(c.sweep_points));
    put("sweep_min_over_g", format_number(c.sweep_min_over_g));
    put("sweep_max_over_g", format_number(c.sweep_max_over_g));
    std::string list;
    for (std::size_t i = 0; i < c.converge_n.size(); ++i)
        list += (i ? "," : "") + std::to_string(c.converge_n[i]);
    put("converge_n", list);
    put("out", c.out);
    put("plot", c.plot);
    put("threads", std::to_string(c.threads));
    return s;
}

} // namespace ringqed::io
