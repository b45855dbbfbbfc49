#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "stancekde/kde.hpp"
#include "stancekde/sample_window.hpp"
#include "stancekde/types.hpp"

namespace stancekde {

struct EstimatorConfig {
    std::size_t window_size = 50;
    NoiseModel noise = NoiseModel::mems_default();
    DeltaThresholds delta = DeltaThresholds::matched_default(noise);
    double sample_rate_hz = 1000.0;

    void validate() const {
        if (window_size < 2) throw ValidationError("EstimatorConfig: window_size must be >= 2");
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
            throw ValidationError("EstimatorConfig: sample_rate_hz must be positive and finite");
        noise.validate();
        delta.validate();
    }

    /// The batch should be about an order of magnitude below the sensor
    /// rate; true when the configured window exceeds rate/10.
    bool window_exceeds_rate_rule() const {
        return static_cast<double>(window_size) > sample_rate_hz / 10.0;
    }
};

/// Streaming per-foot estimator. Each pushed sample updates the sliding
/// window, re-estimates the six per-axis densities, integrates each over
/// +-delta and fuses the factors into a ContactEstimate. Emits one estimate
/// per sample once at least two samples are buffered; estimates carry
/// warm = false until the window first fills. Single writer per foot.
class FootEstimator {
public:
    FootEstimator(EstimatorConfig config, Foot foot)
        : config_(std::move(config)),
          foot_(foot),
          window_(config_.window_size),
          scratch_(config_.window_size) {
        config_.validate();
    }

    const EstimatorConfig& config() const noexcept { return config_; }
    Foot foot() const noexcept { return foot_; }
    bool warm() const noexcept { return window_.full(); }
    std::size_t fill() const noexcept { return window_.fill(); }

    /// Consumes one preprocessed sample (gravity and bias already removed).
    /// Returns no estimate while fewer than two samples are buffered.
    std::optional<ContactEstimate> step(const ImuSample& sample) {
        sample.validate();
        if (sample.foot != foot_)
            throw ValidationError("FootEstimator: sample for foot " +
                                  std::string(to_string(sample.foot)) + " fed to the " +
                                  std::string(to_string(foot_)) + " estimator");
        if (sample.t <= last_t_)
            throw ValidationError("FootEstimator: non-increasing timestamp " +
                                  std::to_string(sample.t));
        last_t_ = sample.t;
        window_.push(sample.axes());
        if (window_.fill() < 2) return std::nullopt;

        Axes6 axis_probs;
        const std::size_t n = window_.fill();
        std::span<double> values(scratch_.data(), n);
        for (std::size_t k = 0; k < kAxisCount; ++k) {
            window_.copy_axis(k, values);
            axis_probs[k] = kde_from_axis(values, config_.noise.sigma[k])
                                .interval_prob(config_.delta.delta[k]);
        }
        return ContactEstimate::fuse(sample.t, foot_, axis_probs, window_.full());
    }

private:
    EstimatorConfig config_;
    Foot foot_;
    SampleWindow window_;
    std::vector<double> scratch_;
    double last_t_ = -std::numeric_limits<double>::infinity();
};

/// Batch driver over step(): one estimate per sample from the second
/// onward. Samples must be time-ordered and belong to a single foot.
inline std::vector<ContactEstimate> estimate_series(const EstimatorConfig& config,
                                                    std::span<const ImuSample> samples) {
    std::vector<ContactEstimate> out;
    if (samples.empty()) return out;
    FootEstimator est(config, samples.front().foot);
    out.reserve(samples.size());
    for (const ImuSample& s : samples) {
        if (s.foot != samples.front().foot)
            throw ValidationError("estimate_series: mixed feet in sample sequence");
        if (auto e = est.step(s)) out.push_back(*e);
    }
    return out;
}

}  // namespace stancekde
