#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "stancekde/contact_model.hpp"
#include "stancekde/estimator.hpp"
#include "stancekde/synth_gait.hpp"
#include "stancekde/types.hpp"

namespace stancekde {

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
};

struct EvalReport {
    double rmse = 0.0;
    std::vector<std::size_t> histogram;  // |pred - truth| binned over [0,1]
    Confusion confusion;
    double threshold = 0.5;
    std::size_t n = 0;
    std::optional<double> throughput_hz;  // set only by the bench path
};

/// Root mean square of prediction minus {0,1} label.
inline double rmse(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        throw ValidationError("rmse: length mismatch (" + std::to_string(pred.size()) + " vs " +
                              std::to_string(truth.size()) + ")");
    if (pred.empty()) throw ValidationError("rmse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

/// Counts of |pred_i - truth_i| in uniform bins over [0, 1]; the boundary
/// value 1.0 lands in the last bin.
inline std::vector<std::size_t> error_histogram(std::span<const double> pred,
                                                std::span<const double> truth,
                                                std::size_t bins) {
    if (pred.size() != truth.size()) throw ValidationError("error_histogram: length mismatch");
    if (pred.empty()) throw ValidationError("error_histogram: empty input");
    if (bins < 2) throw ValidationError("error_histogram: need at least 2 bins");
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = std::fabs(pred[i] - truth[i]);
        auto bin = static_cast<std::size_t>(d * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;
        ++counts[bin];
    }
    return counts;
}

inline Confusion confusion_counts(std::span<const double> pred, std::span<const double> truth,
                                  double threshold) {
    if (pred.size() != truth.size()) throw ValidationError("confusion_counts: length mismatch");
    Confusion c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool hat = pred[i] >= threshold;
        const bool ref = truth[i] >= 0.5;
        if (hat && ref)
            ++c.tp;
        else if (hat && !ref)
            ++c.fp;
        else if (!hat && !ref)
            ++c.tn;
        else
            ++c.fn;
    }
    return c;
}

inline EvalReport score(std::span<const double> pred, std::span<const double> truth,
                        double threshold, std::size_t bins) {
    EvalReport r;
    r.rmse = rmse(pred, truth);
    r.histogram = error_histogram(pred, truth, bins);
    r.confusion = confusion_counts(pred, truth, threshold);
    r.threshold = threshold;
    r.n = pred.size();
    return r;
}

struct SchmittParams {
    double high = 300.0;  // N
    double low = 100.0;   // N
    bool initial = false;

    void validate() const {
        if (!(low < high)) throw ValidationError("SchmittParams: low must be < high");
    }
};

struct ComparisonReport {
    EvalReport method;
    std::optional<EvalReport> baseline;  // absent when the trace has no forces
    std::size_t scored = 0;              // shared index count
    bool warmup_excluded = true;
};

/// Scores the estimator's p_total and the Schmitt-trigger GRF baseline
/// against the trace's stability labels over the exact same sample set.
/// Estimates must align one-to-one with trace samples from the second
/// onward; warm-up estimates are excluded unless include_warmup.
inline ComparisonReport compare(const GaitTrace& trace,
                                std::span<const ContactEstimate> estimates,
                                const SchmittParams& baseline_params, double threshold,
                                std::size_t bins = 10, bool include_warmup = false) {
    baseline_params.validate();
    if (trace.size() < 2 || estimates.size() != trace.size() - 1)
        throw ValidationError("compare: estimates misaligned with trace (" +
                              std::to_string(estimates.size()) + " estimates for " +
                              std::to_string(trace.size()) + " samples)");
    for (std::size_t i = 0; i < estimates.size(); ++i)
        if (estimates[i].t != trace.imu[i + 1].t)
            throw ValidationError("compare: estimate timestamp mismatch at index " +
                                  std::to_string(i));

    std::vector<double> fz(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) fz[i] = trace.forces[i].F.z();
    const std::vector<bool> baseline_state =
        schmitt_contact(fz, baseline_params.high, baseline_params.low, baseline_params.initial);

    std::vector<double> pred_m, pred_b, truth;
    pred_m.reserve(estimates.size());
    pred_b.reserve(estimates.size());
    truth.reserve(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (!include_warmup && !estimates[i].warm) continue;
        const std::size_t row = i + 1;
        pred_m.push_back(estimates[i].p_total);
        pred_b.push_back(baseline_state[row] ? 1.0 : 0.0);
        truth.push_back(trace.labels[row].stable ? 1.0 : 0.0);
    }
    if (pred_m.empty()) throw ValidationError("compare: no scorable samples after warm-up");

    ComparisonReport rep;
    rep.method = score(pred_m, truth, threshold, bins);
    rep.baseline = score(pred_b, truth, threshold, bins);
    rep.scored = pred_m.size();
    rep.warmup_excluded = !include_warmup;
    return rep;
}

struct BenchResult {
    double hz = 0.0;
    std::size_t steps = 0;
    std::string machine;
};

inline std::string machine_descriptor() {
    std::string cpu = "unknown cpu";
    std::ifstream info("/proc/cpuinfo");
    for (std::string line; std::getline(info, line);) {
        if (line.rfind("model name", 0) == 0) {
            const auto pos = line.find(':');
            if (pos != std::string::npos) cpu = line.substr(pos + 2);
            break;
        }
    }
    std::ostringstream os;
    os << cpu << ", "
#if defined(__clang__)
       << "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
       << "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
       << "unknown compiler";
#endif
    return os.str();
}

/// Steady-state single-thread step rate on synthetic noise input with a
/// warm cache. The accumulated probability mass is returned through the
/// result so the timed work cannot be optimized away.
inline BenchResult throughput_bench(const EstimatorConfig& config, std::size_t n_samples) {
    if (n_samples < 100000)
        throw ValidationError("throughput_bench: need at least 1e5 samples");
    config.validate();

    GaussianStream noise(12345);
    constexpr std::size_t kPool = 4096;
    std::vector<ImuSample> pool(kPool);
    const double dt = 1.0 / config.sample_rate_hz;
    for (std::size_t i = 0; i < kPool; ++i) {
        for (int j = 0; j < 3; ++j) {
            pool[i].a[j] = config.noise.sigma[static_cast<std::size_t>(j)] * noise.next();
            pool[i].w[j] = config.noise.sigma[static_cast<std::size_t>(j) + 3] * noise.next();
        }
    }

    FootEstimator est(config, Foot::R);
    double sink = 0.0;
    // warm-up pass fills the window and the cache
    for (std::size_t i = 0; i < 2 * config.window_size; ++i) {
        ImuSample s = pool[i % kPool];
        s.t = static_cast<double>(i + 1) * dt;
        if (auto e = est.step(s)) sink += e->p_total;
    }

    const double t0 = static_cast<double>(2 * config.window_size + 1) * dt;
    const auto begin = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < n_samples; ++i) {
        ImuSample s = pool[i % kPool];
        s.t = t0 + static_cast<double>(i) * dt;
        if (auto e = est.step(s)) sink += e->p_total;
    }
    const auto end = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(end - begin).count();

    BenchResult r;
    r.steps = n_samples;
    r.hz = static_cast<double>(n_samples) / seconds;
    r.machine = machine_descriptor();
    if (sink < 0.0) r.machine += "!";  // keep the sink observable
    return r;
}

}  // namespace stancekde
