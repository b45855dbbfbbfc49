#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stancekde/config.hpp"
#include "stancekde/estimator.hpp"
#include "stancekde/eval.hpp"
#include "stancekde/preprocess.hpp"
#include "stancekde/synth_gait.hpp"
#include "stancekde/trace_io.hpp"

namespace stancekde::cli {

inline RunConfig load_config(const std::string& config_path) {
    return config_path.empty() ? RunConfig::defaults_with_env()
                               : RunConfig::from_file(config_path);
}

// Bias injected by `generate --embed`; recovered by the preprocessing path.
inline BiasEstimate embed_bias() {
    BiasEstimate b;
    b.b_a = {0.05, -0.03, 0.02};
    b.b_w = {0.004, -0.002, 0.003};
    return b;
}

inline void cmd_generate(const std::string& scenario_arg, std::optional<std::uint64_t> seed,
                         const std::string& out_path, bool embed) {
    const auto builtins = builtin_scenarios();
    GaitScenario scenario;
    if (const GaitScenario* s = find_builtin(builtins, scenario_arg)) {
        scenario = *s;
    } else if (std::filesystem::exists(scenario_arg)) {
        scenario = scenario_from_file(scenario_arg);
    } else {
        std::string names;
        for (const GaitScenario& s : builtins) names += " " + s.name;
        throw ValidationError("unknown scenario '" + scenario_arg +
                              "'; known scenarios:" + names +
                              " (or pass a scenario file path)");
    }
    if (seed) scenario.seed = *seed;

    GaitTrace trace = generate(scenario);
    if (embed) embed_raw_effects(trace, embed_bias());

    write_trace_csv(out_path, trace);
    write_meta_json(meta_path_for(out_path), trace.meta);
    std::cerr << "wrote " << trace.size() << " samples to " << out_path << " (+ "
              << meta_path_for(out_path) << ")\n";
}

namespace detail {

struct FootStream {
    Foot foot = Foot::R;
    std::vector<ImuSample> samples;
};

inline std::vector<FootStream> split_by_foot(const std::vector<ImuSample>& rows) {
    std::vector<FootStream> feet;
    for (const ImuSample& s : rows) {
        auto it = std::find_if(feet.begin(), feet.end(),
                               [&](const FootStream& f) { return f.foot == s.foot; });
        if (it == feet.end()) {
            feet.push_back({s.foot, {}});
            it = feet.end() - 1;
        }
        it->samples.push_back(s);
    }
    return feet;
}

/// Startup calibration, attitude filtering and gravity/bias removal over
/// one foot's stream.
inline std::vector<ImuSample> preprocess_stream(const std::vector<ImuSample>& samples,
                                                const RunConfig& cfg) {
    const GravityModel gravity = cfg.gravity_model();
    const std::size_t n_calib = std::min<std::size_t>(cfg.calibration_samples, samples.size());
    const std::span<const ImuSample> calib(samples.data(), n_calib);
    const BiasEstimate bias = calibrate_bias(calib, gravity, cfg.noise());

    Eigen::Vector3d mean_a = Eigen::Vector3d::Zero();
    for (const ImuSample& s : calib) mean_a += s.a;
    mean_a /= static_cast<double>(n_calib);

    AttitudeState att;
    att.q = tilt_from_accel(mean_a - bias.b_a, gravity);
    att.t_last = samples.front().t;

    std::vector<ImuSample> out;
    out.reserve(samples.size());
    out.push_back(compensate(samples.front(), att, bias, gravity));
    for (std::size_t i = 1; i < samples.size(); ++i) {
        att = filter_update(att, samples[i], bias, cfg.filter_gain, gravity);
        out.push_back(compensate(samples[i], att, bias, gravity));
    }
    return out;
}

inline std::vector<ContactEstimate> run_foot(const FootStream& foot, const RunConfig& cfg,
                                             bool precompensated) {
    if (precompensated) return estimate_series(cfg.estimator_config(), foot.samples);
    const std::vector<ImuSample> compensated = preprocess_stream(foot.samples, cfg);
    return estimate_series(cfg.estimator_config(), compensated);
}

}  // namespace detail

inline void cmd_estimate(const std::string& in_path, const std::string& config_path,
                         const std::string& out_path) {
    const RunConfig cfg = load_config(config_path);
    if (cfg.estimator_config().window_exceeds_rate_rule())
        std::cerr << "warning: window_size " << cfg.window_size
                  << " exceeds sample_rate_hz/10; the batch should sit an order of magnitude "
                     "below the sensor rate\n";

    const LoadedTrace trace = load_trace_csv(in_path);
    const auto meta = try_load_meta_json(meta_path_for(in_path));
    const bool precompensated =
        cfg.precompensated.value_or(meta ? meta->precompensated : true);

    auto feet = detail::split_by_foot(trace.imu);
    std::sort(feet.begin(), feet.end(), [](const auto& a, const auto& b) {
        return static_cast<int>(a.foot) < static_cast<int>(b.foot);
    });

    std::vector<std::vector<ContactEstimate>> results(feet.size());
    if (feet.size() == 1) {
        results[0] = detail::run_foot(feet[0], cfg, precompensated);
    } else {
        std::vector<std::future<std::vector<ContactEstimate>>> jobs;
        jobs.reserve(feet.size());
        for (const auto& f : feet)
            jobs.push_back(std::async(std::launch::async, [&cfg, &f, precompensated] {
                return detail::run_foot(f, cfg, precompensated);
            }));
        for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i].get();
    }

    std::vector<ContactEstimate> merged;
    for (const auto& r : results) merged.insert(merged.end(), r.begin(), r.end());
    write_estimates_csv(out_path, merged);
    std::cerr << "wrote " << merged.size() << " estimates to " << out_path << "\n";
}

inline void cmd_eval(const std::string& trace_path, const std::string& estimates_path,
                     const std::string& config_path, const std::string& report_path) {
    const RunConfig cfg = load_config(config_path);
    const LoadedTrace trace = load_trace_csv(trace_path);
    const std::vector<ContactEstimate> estimates = load_estimates_csv(estimates_path);

    std::vector<GroundTruthLabel> labels;
    if (trace.has_labels) {
        labels = trace.labels;
    } else if (trace.has_forces && trace.has_velocity && trace.has_angvel) {
        labels = label_trace(trace.forces, trace.vel, trace.angvel, cfg.vel_eps, cfg.fz_eps);
    } else {
        throw ValidationError(
            trace_path +
            ": cannot label the trace; need label_stable/label_contact columns or the full "
            "fx,fy,fz,vx,vy,vz,wvx,wvy,wvz channel set");
    }

    const bool baseline_available = trace.has_forces;
    if (!baseline_available)
        std::cerr << "note: trace has no force columns; Schmitt baseline unavailable\n";

    // Per-foot alignment: estimates must be rows 2..n of that foot's trace.
    std::map<Foot, std::vector<std::size_t>> rows_by_foot;
    for (std::size_t i = 0; i < trace.imu.size(); ++i)
        rows_by_foot[trace.imu[i].foot].push_back(i);
    std::map<Foot, std::vector<ContactEstimate>> est_by_foot;
    for (const ContactEstimate& e : estimates) est_by_foot[e.foot].push_back(e);

    std::vector<double> pred_m, pred_b, truth;
    for (const auto& [foot, rows] : rows_by_foot) {
        const auto it = est_by_foot.find(foot);
        if (it == est_by_foot.end() || it->second.size() != rows.size() - 1)
            throw ValidationError("alignment error: foot " + std::string(to_string(foot)) +
                                  " has " + std::to_string(rows.size()) + " trace rows but " +
                                  std::to_string(it == est_by_foot.end() ? 0
                                                                         : it->second.size()) +
                                  " estimates (expected rows - 1)");
        std::vector<bool> baseline_state;
        if (baseline_available) {
            std::vector<double> fz(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) fz[i] = trace.forces[rows[i]].F.z();
            baseline_state =
                schmitt_contact(fz, cfg.schmitt_high, cfg.schmitt_low, false);
        }
        for (std::size_t i = 0; i < it->second.size(); ++i) {
            const ContactEstimate& e = it->second[i];
            const std::size_t row = rows[i + 1];
            if (e.t != trace.imu[row].t)
                throw ValidationError("alignment error: estimate t=" + format_double(e.t) +
                                      " does not match trace row t=" +
                                      format_double(trace.imu[row].t) + " for foot " +
                                      std::string(to_string(foot)));
            if (!cfg.include_warmup && !e.warm) continue;
            pred_m.push_back(e.p_total);
            truth.push_back(labels[row].stable ? 1.0 : 0.0);
            if (baseline_available) pred_b.push_back(baseline_state[i + 1] ? 1.0 : 0.0);
        }
    }
    if (pred_m.empty()) throw ValidationError("no scorable samples (all warm-up?)");

    const EvalReport method =
        score(pred_m, truth, cfg.decision_threshold, cfg.histogram_bins);
    std::optional<EvalReport> baseline;
    if (baseline_available)
        baseline = score(pred_b, truth, cfg.decision_threshold, cfg.histogram_bins);

    nlohmann::json j;
    j["method"] = report_to_json(method);
    j["baseline"] = baseline ? report_to_json(*baseline) : nlohmann::json(nullptr);
    j["meta"] = {{"trace", trace_path},
                 {"estimates", estimates_path},
                 {"scored", method.n},
                 {"warmup_excluded", !cfg.include_warmup},
                 {"label_convention",
                  "stable requires contact and near-zero sole velocity; swing counts as "
                  "unstable"}};
    std::ofstream os(report_path);
    if (!os) throw ValidationError("cannot open '" + report_path + "' for writing");
    os << j.dump(2) << '\n';

    std::string hist_path = report_path;
    if (hist_path.size() > 5 && hist_path.substr(hist_path.size() - 5) == ".json")
        hist_path = hist_path.substr(0, hist_path.size() - 5);
    hist_path += ".hist.csv";
    write_histogram_csv(hist_path, cfg.histogram_bins, method.histogram,
                        baseline ? std::span<const std::size_t>(baseline->histogram)
                                 : std::span<const std::size_t>());

    std::cout << "method rmse " << method.rmse;
    if (baseline) std::cout << ", baseline rmse " << baseline->rmse;
    std::cout << " over " << method.n << " samples\n";
    std::cerr << "wrote " << report_path << " and " << hist_path << "\n";
}

inline void cmd_bench(const std::string& config_path, std::size_t n) {
    const RunConfig cfg = load_config(config_path);
    const BenchResult r = throughput_bench(cfg.estimator_config(), n);
    std::cout << "throughput " << r.hz << " Hz over " << r.steps << " steps (window "
              << cfg.window_size << ", single thread) on " << r.machine << "\n";
}

}  // namespace stancekde::cli
