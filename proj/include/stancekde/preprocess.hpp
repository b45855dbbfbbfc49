#pragma once

#include <cmath>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "stancekde/types.hpp"

namespace stancekde {

struct InsufficientDataError : ValidationError {
    using ValidationError::ValidationError;
};
struct MotionDetectedError : ValidationError {
    using ValidationError::ValidationError;
};
struct StaleStreamError : ValidationError {
    using ValidationError::ValidationError;
};

/// World-frame gravity vector; default points down along -z.
struct GravityModel {
    Eigen::Vector3d g{0.0, 0.0, -9.80665};

    static GravityModel standard() { return GravityModel{}; }

    /// Simulation traces may use a non-physical gravity; pass
    /// allow_nonphysical to skip the magnitude check.
    static GravityModel from_vector(const Eigen::Vector3d& g, bool allow_nonphysical = false) {
        GravityModel m{g};
        if (!g.allFinite()) throw ValidationError("GravityModel: non-finite gravity vector");
        if (!allow_nonphysical) {
            const double n = g.norm();
            if (n < 9.7 || n > 9.9)
                throw ValidationError("GravityModel: |g| = " + std::to_string(n) +
                                      " outside [9.7, 9.9] (use the override for simulation)");
        }
        return m;
    }
};

/// Constant accelerometer/gyroscope biases, held fixed after calibration.
struct BiasEstimate {
    Eigen::Vector3d b_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d b_w = Eigen::Vector3d::Zero();

    static constexpr double kMaxAccelBias = 1.0;  // m/s^2
    static constexpr double kMaxGyroBias = 0.5;   // rad/s

    void validate() const {
        if (!b_a.allFinite() || !b_w.allFinite())
            throw ValidationError("BiasEstimate: non-finite bias");
        if (b_a.norm() > kMaxAccelBias)
            throw ValidationError("BiasEstimate: accelerometer bias above plausibility bound");
        if (b_w.norm() > kMaxGyroBias)
            throw ValidationError("BiasEstimate: gyroscope bias above plausibility bound");
    }
};

/// Foot-to-world rotation, kept normalized after every update.
struct AttitudeState {
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    double t_last = 0.0;
};

/// Gravity's reaction term as the accelerometer sees it in the foot frame.
/// A stationary, level sensor with g = (0,0,-9.80665) reads +9.80665 on z;
/// the same term is used in measurement synthesis and in compensation so
/// the two are exact inverses.
inline Eigen::Vector3d gravity_reaction(const Eigen::Quaterniond& q_foot_to_world,
                                        const GravityModel& gravity) {
    return q_foot_to_world.conjugate() * (-gravity.g);
}

/// Tilt-only attitude that aligns a measured specific-force direction with
/// gravity's reaction (minimal rotation). Yaw is unobservable from the
/// accelerometer and left at zero.
inline Eigen::Quaterniond tilt_from_accel(const Eigen::Vector3d& mean_accel,
                                          const GravityModel& gravity) {
    const double n = mean_accel.norm();
    if (!(n > 1e-6))
        throw ValidationError("tilt_from_accel: mean specific force is numerically zero");
    // q maps foot to world, so the measured direction must map onto -g_hat.
    return Eigen::Quaterniond::FromTwoVectors(mean_accel / n, -gravity.g.normalized());
}

/// Startup bias calibration from samples taken while the foot is known
/// stationary. The gyro bias is the plain mean. For the accelerometer the
/// tilt that aligns the mean reading with gravity's reaction is estimated
/// first and the aligned reaction subtracted; a lateral bias component is
/// indistinguishable from tilt on stationary data and is absorbed into the
/// tilt estimate, which leaves compensated stance readings unbiased at the
/// calibration attitude.
inline BiasEstimate calibrate_bias(std::span<const ImuSample> stationary_samples,
                                   const GravityModel& gravity, const NoiseModel& noise) {
    constexpr std::size_t kMinSamples = 100;
    if (stationary_samples.size() < kMinSamples)
        throw InsufficientDataError("calibrate_bias: need at least 100 stationary samples, got " +
                                    std::to_string(stationary_samples.size()));

    const double n = static_cast<double>(stationary_samples.size());
    Eigen::Vector3d mean_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d mean_w = Eigen::Vector3d::Zero();
    for (const ImuSample& s : stationary_samples) {
        s.validate();
        mean_a += s.a;
        mean_w += s.w;
    }
    mean_a /= n;
    mean_w /= n;

    Axes6 var{};
    for (const ImuSample& s : stationary_samples) {
        const Eigen::Vector3d da = s.a - mean_a;
        const Eigen::Vector3d dw = s.w - mean_w;
        for (int i = 0; i < 3; ++i) {
            var[static_cast<std::size_t>(i)] += da[i] * da[i];
            var[static_cast<std::size_t>(i) + 3] += dw[i] * dw[i];
        }
    }
    for (std::size_t k = 0; k < kAxisCount; ++k) {
        const double sd = std::sqrt(var[k] / n);
        if (sd > 10.0 * noise.sigma[k])
            throw MotionDetectedError("calibrate_bias: axis " + std::string(kAxisNames[k]) +
                                      " sample stddev " + std::to_string(sd) +
                                      " exceeds 10x declared sigma; foot not stationary?");
    }

    const Eigen::Quaterniond tilt = tilt_from_accel(mean_a, gravity);
    BiasEstimate bias;
    bias.b_a = mean_a - gravity_reaction(tilt, gravity);
    bias.b_w = mean_w;
    bias.validate();
    return bias;
}

/// One complementary-filter update: integrate the bias-corrected gyro over
/// dt, then rotate the tilt toward the accelerometer's gravity direction by
/// `gain` times the residual tilt angle. gain -> 1 snaps the tilt to the
/// accelerometer in one step, small gains trust the gyro, and gain = 0
/// disables the accelerometer correction (pure integration).
inline AttitudeState filter_update(const AttitudeState& state, const ImuSample& raw,
                                   const BiasEstimate& bias, double gain,
                                   const GravityModel& gravity = GravityModel::standard()) {
    if (!(gain >= 0.0 && gain < 1.0))
        throw ValidationError("filter_update: gain must lie in [0, 1)");
    raw.validate();
    const double dt = raw.t - state.t_last;
    if (dt <= 0.0)
        throw ValidationError("filter_update: non-increasing timestamp (dt = " +
                              std::to_string(dt) + ")");
    if (dt > 0.1)
        throw StaleStreamError("filter_update: dt = " + std::to_string(dt) +
                               " s exceeds the 0.1 s stale-stream limit");

    AttitudeState next;
    next.t_last = raw.t;

    // Gyro integration, body frame (right multiplication).
    const Eigen::Vector3d theta = (raw.w - bias.b_w) * dt;
    const double angle = theta.norm();
    Eigen::Quaterniond q = state.q;
    if (angle > 0.0)
        q = q * Eigen::Quaterniond(Eigen::AngleAxisd(angle, theta / angle));

    // Tilt correction from the measured specific-force direction.
    const Eigen::Vector3d a_corr = raw.a - bias.b_a;
    const double a_norm = a_corr.norm();
    if (gain > 0.0 && a_norm > 1e-6) {
        const Eigen::Vector3d u_meas = a_corr / a_norm;
        const Eigen::Vector3d u_pred = gravity_reaction(q, gravity).normalized();
        const Eigen::Vector3d cross = u_pred.cross(u_meas);
        const double cross_norm = cross.norm();
        const double tilt_err = std::atan2(cross_norm, u_pred.dot(u_meas));
        if (cross_norm > 1e-12) {
            // delta rotates body-frame vectors so the predicted reaction
            // moves a `gain` fraction of the way toward the measurement.
            const Eigen::Quaterniond delta(
                Eigen::AngleAxisd(-gain * tilt_err, cross / cross_norm));
            q = q * delta;
        }
    }

    q.normalize();
    next.q = q;
    return next;
}

/// Removes bias and the attitude-aligned gravity reaction, realizing the
/// simplified measurement model (true motion plus zero-mean noise).
inline ImuSample compensate(const ImuSample& raw, const AttitudeState& state,
                            const BiasEstimate& bias,
                            const GravityModel& gravity = GravityModel::standard()) {
    ImuSample out = raw;
    out.a = raw.a - bias.b_a - gravity_reaction(state.q, gravity);
    out.w = raw.w - bias.b_w;
    return out;
}

}  // namespace stancekde
