#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace stancekde {

/// Thrown on invalid data or configuration (maps to CLI exit code 2).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Axis order used everywhere a six-axis vector appears:
// (a_x, a_y, a_z, w_x, w_y, w_z), indices 0..5.
inline constexpr std::size_t kAxisCount = 6;
inline constexpr std::array<const char*, kAxisCount> kAxisNames = {"ax", "ay", "az",
                                                                   "wx", "wy", "wz"};

using Axes6 = std::array<double, kAxisCount>;

/// Foot identifier. L/R for bipeds, RL/RR/FL/FR for quadrupeds; one family
/// per trace.
enum class Foot { L, R, RL, RR, FL, FR };

enum class FootFamily { Biped, Quadruped };

inline FootFamily family(Foot f) {
    return (f == Foot::L || f == Foot::R) ? FootFamily::Biped : FootFamily::Quadruped;
}

inline const char* to_string(Foot f) {
    switch (f) {
        case Foot::L: return "L";
        case Foot::R: return "R";
        case Foot::RL: return "RL";
        case Foot::RR: return "RR";
        case Foot::FL: return "FL";
        case Foot::FR: return "FR";
    }
    return "?";
}

inline Foot foot_from_string(const std::string& s) {
    if (s == "L") return Foot::L;
    if (s == "R") return Foot::R;
    if (s == "RL") return Foot::RL;
    if (s == "RR") return Foot::RR;
    if (s == "FL") return Foot::FL;
    if (s == "FR") return Foot::FR;
    throw ValidationError("unknown foot label '" + s + "' (expected L, R, RL, RR, FL or FR)");
}

/// One timestamped six-axis inertial reading for one foot. Linear
/// acceleration in m/s^2 and angular velocity in rad/s, both in the foot
/// frame.
struct ImuSample {
    double t = 0.0;
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    Eigen::Vector3d w = Eigen::Vector3d::Zero();
    Foot foot = Foot::R;

    Axes6 axes() const { return {a.x(), a.y(), a.z(), w.x(), w.y(), w.z()}; }

    void validate() const {
        if (!std::isfinite(t) || t < 0.0)
            throw ValidationError("ImuSample: t must be finite and non-negative");
        const Axes6 v = axes();
        for (std::size_t k = 0; k < kAxisCount; ++k)
            if (!std::isfinite(v[k]))
                throw ValidationError("ImuSample: non-finite value on axis " +
                                      std::string(kAxisNames[k]) + " (index " +
                                      std::to_string(k) + ")");
    }
};

/// Per-axis measurement standard deviations from the sensor specification.
/// These double as the KDE bandwidths.
struct NoiseModel {
    Axes6 sigma;

    explicit NoiseModel(const Axes6& s) : sigma(s) { validate(); }
    NoiseModel(double sigma_accel, double sigma_gyro)
        : sigma{sigma_accel, sigma_accel, sigma_accel, sigma_gyro, sigma_gyro, sigma_gyro} {
        validate();
    }

    /// Mid-range MEMS IMU at 1 kHz: 0.02467 m/s^2 accel, 0.01653 rad/s gyro.
    static NoiseModel mems_default() { return NoiseModel(0.02467, 0.01653); }

    void validate() const {
        for (std::size_t k = 0; k < kAxisCount; ++k)
            if (!(sigma[k] > 0.0) || !std::isfinite(sigma[k]))
                throw ValidationError("NoiseModel: sigma[" + std::to_string(k) +
                                      "] must be strictly positive and finite");
    }
};

/// Per-axis half-widths of the interval the estimated density is integrated
/// over (same units as the axis).
struct DeltaThresholds {
    Axes6 delta;

    explicit DeltaThresholds(const Axes6& d) : delta(d) { validate(); }

    static DeltaThresholds sigma_multiple(const NoiseModel& noise, double k) {
        if (!(k > 0.0) || !std::isfinite(k))
            throw ValidationError("DeltaThresholds: sigma multiple must be positive");
        Axes6 d;
        for (std::size_t i = 0; i < kAxisCount; ++i) d[i] = k * noise.sigma[i];
        return DeltaThresholds(d);
    }

    // Default half-width. The density estimated from pure noise has variance
    // sigma^2 (data) + h^2 (kernel) = 2*sigma^2, so an interval of
    // 3*sqrt(2)*sigma keeps ~99.73% of a still foot's estimated mass inside,
    // scoring near 1 per axis while sustained motion a few sigma wide scores
    // near 0.
    static constexpr double kDefaultSigmaMultiple = 4.242640687119285;  // 3*sqrt(2)

    static DeltaThresholds matched_default(const NoiseModel& noise) {
        return sigma_multiple(noise, kDefaultSigmaMultiple);
    }

    void validate() const {
        for (std::size_t k = 0; k < kAxisCount; ++k)
            if (!(delta[k] > 0.0) || !std::isfinite(delta[k]))
                throw ValidationError("DeltaThresholds: delta[" + std::to_string(k) +
                                      "] must be strictly positive and finite");
    }
};

/// Per-axis interval probabilities fused into tangential, rotational and
/// total stable-contact probabilities. Tangential stability is governed by
/// {a_x, a_y, w_z}, rotational by {a_z, w_x, w_y}; the per-axis factors are
/// independent, so the groups and the total are plain products.
struct ContactEstimate {
    double t = 0.0;
    Foot foot = Foot::R;
    Axes6 axis_probs{};
    double p_tangential = 0.0;
    double p_rotational = 0.0;
    double p_total = 0.0;
    bool warm = false;  // window had reached full capacity when emitted

    static constexpr std::array<std::size_t, 3> kTangentialAxes = {0, 1, 5};
    static constexpr std::array<std::size_t, 3> kRotationalAxes = {2, 3, 4};

    static ContactEstimate fuse(double t, Foot foot, const Axes6& axis_probs, bool warm) {
        ContactEstimate e;
        e.t = t;
        e.foot = foot;
        e.axis_probs = axis_probs;
        e.warm = warm;
        for (std::size_t k = 0; k < kAxisCount; ++k) {
            const double p = axis_probs[k];
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError("ContactEstimate: axis probability out of [0,1] on axis " +
                                      std::to_string(k));
        }
        e.p_tangential = axis_probs[0] * axis_probs[1] * axis_probs[5];
        e.p_rotational = axis_probs[2] * axis_probs[3] * axis_probs[4];
        e.p_total = e.p_tangential * e.p_rotational;
        return e;
    }
};

}  // namespace stancekde
