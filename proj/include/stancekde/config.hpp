#pragma once

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stancekde/estimator.hpp"
#include "stancekde/eval.hpp"
#include "stancekde/synth_gait.hpp"
#include "stancekde/types.hpp"

namespace stancekde {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e)
        throw ValidationError(what + ": cannot parse number from '" + s + "'");
    return v;
}

inline std::size_t parse_size(const std::string& s, const std::string& what) {
    std::size_t v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e)
        throw ValidationError(what + ": cannot parse integer from '" + s + "'");
    return v;
}

inline bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ValidationError(what + ": cannot parse boolean from '" + s + "'");
}

inline Axes6 parse_axes6(const std::string& s, const std::string& what) {
    const auto toks = split_ws(s);
    if (toks.size() != kAxisCount)
        throw ValidationError(what + ": expected 6 values, got " + std::to_string(toks.size()));
    Axes6 v;
    for (std::size_t i = 0; i < kAxisCount; ++i) v[i] = parse_double(toks[i], what);
    return v;
}

inline Eigen::Vector3d parse_vec3(const std::string& s, const std::string& what) {
    const auto toks = split_ws(s);
    if (toks.size() != 3)
        throw ValidationError(what + ": expected 3 values, got " + std::to_string(toks.size()));
    return {parse_double(toks[0], what), parse_double(toks[1], what),
            parse_double(toks[2], what)};
}

/// Ordered key/value pairs from a declarative config file. Lines are
/// `key = value`; '#' starts a comment; repeated keys are preserved.
inline std::vector<std::pair<std::string, std::string>> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
        kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return kv;
}

}  // namespace detail

/// Runtime configuration for the pipeline commands. Every key can come from
/// a config file and be overridden by an environment variable named
/// STANCEKDE_<KEY> (key upper-cased).
struct RunConfig {
    // estimator
    std::size_t window_size = 50;
    Axes6 sigma = NoiseModel::mems_default().sigma;
    std::optional<Axes6> delta_values;           // explicit per-axis half-widths
    std::optional<double> delta_sigma_multiple;  // "<k>sigma" shorthand
    double sample_rate_hz = 1000.0;
    // preprocessing
    double filter_gain = 0.02;
    Eigen::Vector3d gravity{0.0, 0.0, -9.80665};
    std::size_t calibration_samples = 400;
    // bypass attitude/bias removal; unset = follow the trace's meta sidecar
    // (pre-compensated when no sidecar exists)
    std::optional<bool> precompensated;
    // labeling
    double vel_eps = 1e-3;
    double fz_eps = 1.0;
    // GRF baseline
    double schmitt_high = 300.0;
    double schmitt_low = 100.0;
    // scoring
    double decision_threshold = 0.5;
    bool include_warmup = false;
    std::size_t histogram_bins = 10;

    static constexpr const char* kEnvPrefix = "STANCEKDE_";

    static const std::vector<std::string>& known_keys() {
        static const std::vector<std::string> keys = {
            "window_size",    "sigma",          "delta",
            "sample_rate_hz", "filter_gain",    "gravity",
            "calibration_samples", "precompensated", "vel_eps",
            "fz_eps",         "schmitt_high",   "schmitt_low",
            "decision_threshold", "include_warmup", "histogram_bins"};
        return keys;
    }

    void set(const std::string& key, const std::string& value) {
        using namespace detail;
        if (key == "window_size")
            window_size = parse_size(value, key);
        else if (key == "sigma")
            sigma = parse_axes6(value, key);
        else if (key == "delta") {
            const auto pos = value.find("sigma");
            if (pos != std::string::npos && pos + 5 == value.size()) {
                delta_sigma_multiple = parse_double(trim(value.substr(0, pos)), key);
                delta_values.reset();
            } else {
                delta_values = parse_axes6(value, key);
                delta_sigma_multiple.reset();
            }
        } else if (key == "sample_rate_hz")
            sample_rate_hz = parse_double(value, key);
        else if (key == "filter_gain")
            filter_gain = parse_double(value, key);
        else if (key == "gravity")
            gravity = parse_vec3(value, key);
        else if (key == "calibration_samples")
            calibration_samples = parse_size(value, key);
        else if (key == "precompensated") {
            if (value == "auto")
                precompensated.reset();
            else
                precompensated = parse_bool(value, key);
        }
        else if (key == "vel_eps")
            vel_eps = parse_double(value, key);
        else if (key == "fz_eps")
            fz_eps = parse_double(value, key);
        else if (key == "schmitt_high")
            schmitt_high = parse_double(value, key);
        else if (key == "schmitt_low")
            schmitt_low = parse_double(value, key);
        else if (key == "decision_threshold")
            decision_threshold = parse_double(value, key);
        else if (key == "include_warmup")
            include_warmup = parse_bool(value, key);
        else if (key == "histogram_bins")
            histogram_bins = parse_size(value, key);
        else
            throw ValidationError("unknown configuration key '" + key + "'");
    }

    void apply_env() {
        for (const std::string& key : known_keys()) {
            std::string env = kEnvPrefix;
            for (char c : key) env += static_cast<char>(std::toupper(c));
            if (const char* v = std::getenv(env.c_str())) set(key, v);
        }
    }

    static RunConfig from_file(const std::string& path) {
        RunConfig cfg;
        for (const auto& [k, v] : detail::parse_kv_file(path)) cfg.set(k, v);
        cfg.apply_env();
        cfg.validate();
        return cfg;
    }

    static RunConfig defaults_with_env() {
        RunConfig cfg;
        cfg.apply_env();
        cfg.validate();
        return cfg;
    }

    NoiseModel noise() const { return NoiseModel(sigma); }

    DeltaThresholds delta() const {
        if (delta_values) return DeltaThresholds(*delta_values);
        if (delta_sigma_multiple)
            return DeltaThresholds::sigma_multiple(noise(), *delta_sigma_multiple);
        return DeltaThresholds::matched_default(noise());
    }

    EstimatorConfig estimator_config() const {
        EstimatorConfig ec;
        ec.window_size = window_size;
        ec.noise = noise();
        ec.delta = delta();
        ec.sample_rate_hz = sample_rate_hz;
        ec.validate();
        return ec;
    }

    SchmittParams schmitt() const {
        SchmittParams p;
        p.high = schmitt_high;
        p.low = schmitt_low;
        p.validate();
        return p;
    }

    GravityModel gravity_model() const { return GravityModel::from_vector(gravity, true); }

    void validate() const {
        estimator_config();
        schmitt();
        gravity_model();
        if (!(filter_gain >= 0.0 && filter_gain < 1.0))
            throw ValidationError("filter_gain: must lie in [0, 1)");
        if (calibration_samples < 100)
            throw ValidationError("calibration_samples: need at least 100");
        if (!(vel_eps > 0.0) || !(fz_eps > 0.0))
            throw ValidationError("vel_eps/fz_eps: must be positive");
        if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0))
            throw ValidationError("decision_threshold: must lie in [0, 1]");
        if (histogram_bins < 2) throw ValidationError("histogram_bins: need at least 2");
    }
};

/// Scenario files reuse the key-value format; each `phase = kind duration
/// [param=value ...]` line appends one phase in order.
inline GaitScenario scenario_from_file(const std::string& path) {
    using namespace detail;
    GaitScenario s;
    s.name = "custom";
    for (const auto& [key, value] : parse_kv_file(path)) {
        if (key == "name")
            s.name = value;
        else if (key == "sample_rate_hz")
            s.sample_rate_hz = parse_double(value, key);
        else if (key == "seed")
            s.seed = parse_size(value, key);
        else if (key == "sigma")
            s.noise = NoiseModel(parse_axes6(value, key));
        else if (key == "force_scale")
            s.force_scale = parse_double(value, key);
        else if (key == "foot")
            s.foot = foot_from_string(value);
        else if (key == "vel_eps")
            s.vel_eps = parse_double(value, key);
        else if (key == "fz_eps")
            s.fz_eps = parse_double(value, key);
        else if (key == "phase") {
            const auto toks = split_ws(value);
            if (toks.size() < 2)
                throw ValidationError("phase: expected '<kind> <duration> [param=value ...]'");
            GaitPhase p;
            p.kind = phase_kind_from_string(toks[0]);
            p.duration = parse_double(toks[1], "phase duration");
            if (p.kind == PhaseKind::Swing) p.load = 0.0;
            if (p.kind == PhaseKind::SoftStance) p.force_scale = 0.5;
            double mu_s = p.friction.mu_s, mu_k = -1.0;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                const auto eq = toks[i].find('=');
                if (eq == std::string::npos)
                    throw ValidationError("phase: expected param=value, got '" + toks[i] + "'");
                const std::string pk = toks[i].substr(0, eq);
                const double pv = parse_double(toks[i].substr(eq + 1), "phase " + pk);
                if (pk == "mu_s")
                    mu_s = pv;
                else if (pk == "mu_k")
                    mu_k = pv;
                else if (pk == "load")
                    p.load = pv;
                else if (pk == "force_scale")
                    p.force_scale = pv;
                else if (pk == "v_forward")
                    p.swing.v_forward = pv;
                else if (pk == "v_vertical")
                    p.swing.v_vertical = pv;
                else if (pk == "w_pitch")
                    p.swing.w_pitch = pv;
                else if (pk == "osc_freq")
                    p.impact.osc_freq_hz = pv;
                else if (pk == "osc_decay")
                    p.impact.osc_decay = pv;
                else if (pk == "vel_amp")
                    p.impact.vel_amp = pv;
                else if (pk == "angvel_amp")
                    p.impact.angvel_amp = pv;
                else if (pk == "tangential_frac")
                    p.impact.tangential_frac = pv;
                else if (pk == "fz_overshoot")
                    p.impact.fz_overshoot = pv;
                else if (pk == "drive_ratio")
                    p.slip.drive_ratio = pv;
                else if (pk == "mass")
                    p.slip.effective_mass = pv;
                else
                    throw ValidationError("phase: unknown parameter '" + pk + "'");
            }
            p.friction = FrictionModel(mu_s, mu_k > 0.0 ? mu_k : 0.8 * mu_s);
            s.phases.push_back(p);
        } else {
            throw ValidationError("unknown scenario key '" + key + "'");
        }
    }
    s.validate();
    return s;
}

}  // namespace stancekde
