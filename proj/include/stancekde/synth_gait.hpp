#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "stancekde/contact_model.hpp"
#include "stancekde/preprocess.hpp"
#include "stancekde/types.hpp"

namespace stancekde {

/// Seedable standard-normal stream: mt19937_64 (bit-exact per the C++
/// standard) feeding 53-bit uniforms into the Box-Muller transform. Avoids
/// std::normal_distribution, whose algorithm is implementation-defined, so
/// traces regenerate identically across toolchains.
class GaussianStream {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform53();
        const double u2 = uniform53();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1), log arg in (0,1]
        const double phase = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phase);
        have_spare_ = true;
        return r * std::cos(phase);
    }

private:
    double uniform53() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

enum class PhaseKind { Stance, Swing, Slip, Impact, SoftStance };

inline const char* to_string(PhaseKind k) {
    switch (k) {
        case PhaseKind::Stance: return "stance";
        case PhaseKind::Swing: return "swing";
        case PhaseKind::Slip: return "slip";
        case PhaseKind::Impact: return "impact";
        case PhaseKind::SoftStance: return "soft_stance";
    }
    return "?";
}

inline PhaseKind phase_kind_from_string(const std::string& s) {
    if (s == "stance") return PhaseKind::Stance;
    if (s == "swing") return PhaseKind::Swing;
    if (s == "slip") return PhaseKind::Slip;
    if (s == "impact") return PhaseKind::Impact;
    if (s == "soft_stance") return PhaseKind::SoftStance;
    throw ValidationError("unknown phase kind '" + s + "'");
}

struct SwingParams {
    double v_forward = 0.6;   // m/s peak forward sole speed
    double v_vertical = 0.25; // m/s peak vertical sole speed
    double w_pitch = 1.2;     // rad/s peak pitch rate
};

struct ImpactParams {
    double osc_freq_hz = 30.0;     // landing transient frequency
    double osc_decay = 10.0;       // 1/s exponential decay
    double vel_amp = 0.03;         // m/s micro-slip velocity amplitude
    double angvel_amp = 0.3;       // rad/s micro-rotation amplitude
    double tangential_frac = 1.3;  // peak |F_t| as a fraction of mu_s*F_z
    double fz_overshoot = 0.15;    // relative F_z oscillation amplitude
};

struct SlipParams {
    double drive_ratio = 1.5;     // applied shear / (mu_s * F_z); > mu_k/mu_s
    double effective_mass = 2.0;  // kg resisting the friction deficit
};

struct GaitPhase {
    PhaseKind kind = PhaseKind::Stance;
    double duration = 0.6;  // s
    FrictionModel friction{0.1, 0.08};
    double load = 500.0;       // nominal vertical GRF in N while grounded
    double force_scale = 1.0;  // per-phase multiplier on emitted forces
    SwingParams swing{};
    ImpactParams impact{};
    SlipParams slip{};

    void validate() const {
        if (!(duration > 0.0) || !std::isfinite(duration))
            throw ValidationError("GaitPhase: duration must be positive");
        friction.validate();
        if (!(load >= 0.0) || !(force_scale >= 0.0))
            throw ValidationError("GaitPhase: load and force_scale must be non-negative");
        if (kind == PhaseKind::Slip && !(slip.drive_ratio * friction.mu_s > friction.mu_k))
            throw ValidationError("GaitPhase: slip drive must exceed kinetic friction");
    }
};

inline GaitPhase stance_phase(double duration, double mu_s = 0.1, double load = 500.0) {
    GaitPhase p;
    p.kind = PhaseKind::Stance;
    p.duration = duration;
    p.friction = FrictionModel(mu_s, 0.8 * mu_s);
    p.load = load;
    return p;
}

inline GaitPhase soft_stance_phase(double duration, double mu_s = 0.1, double load = 500.0,
                                   double force_scale = 0.5) {
    GaitPhase p = stance_phase(duration, mu_s, load);
    p.kind = PhaseKind::SoftStance;
    p.force_scale = force_scale;
    return p;
}

inline GaitPhase swing_phase(double duration = 0.4) {
    GaitPhase p;
    p.kind = PhaseKind::Swing;
    p.duration = duration;
    p.load = 0.0;
    return p;
}

inline GaitPhase impact_phase(double duration = 0.08, double mu_s = 0.1, double load = 500.0) {
    GaitPhase p;
    p.kind = PhaseKind::Impact;
    p.duration = duration;
    p.friction = FrictionModel(mu_s, 0.8 * mu_s);
    p.load = load;
    return p;
}

inline GaitPhase slip_phase(double duration = 0.5, double mu_s = 0.03, double load = 500.0) {
    GaitPhase p;
    p.kind = PhaseKind::Slip;
    p.duration = duration;
    p.friction = FrictionModel(mu_s, 0.8 * mu_s);
    p.load = load;
    return p;
}

struct GaitScenario {
    std::string name = "custom";
    std::vector<GaitPhase> phases;
    double sample_rate_hz = 1000.0;
    NoiseModel noise = NoiseModel::mems_default();
    std::uint64_t seed = 1;
    double force_scale = 1.0;  // whole-trace force multiplier (soft terrain)
    Foot foot = Foot::R;
    double vel_eps = 1e-3;  // labeling tolerances, echoed into the meta
    double fz_eps = 1.0;

    double total_duration() const {
        double d = 0.0;
        for (const GaitPhase& p : phases) d += p.duration;
        return d;
    }

    std::size_t total_samples() const {
        return static_cast<std::size_t>(sample_rate_hz * total_duration());
    }

    void validate(std::size_t min_samples = 100) const {
        if (phases.empty()) throw ValidationError("GaitScenario: no phases");
        for (const GaitPhase& p : phases) p.validate();
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
            throw ValidationError("GaitScenario: sample rate must be positive");
        noise.validate();
        if (!(force_scale >= 0.0)) throw ValidationError("GaitScenario: negative force scale");
        if (total_samples() < min_samples)
            throw ValidationError("GaitScenario: trace too short (" +
                                  std::to_string(total_samples()) + " samples, need >= " +
                                  std::to_string(min_samples) + ")");
    }
};

struct PhaseSpan {
    std::string kind;
    double t_begin = 0.0;
    double t_end = 0.0;
    double mu_s = 0.0;
    std::size_t first_sample = 0;
    std::size_t n_samples = 0;
};

struct TraceMeta {
    std::string name;
    std::uint64_t seed = 0;
    std::string prng = GaussianStream::kAlgorithm;
    double sample_rate_hz = 1000.0;
    Axes6 sigma{};
    double force_scale = 1.0;
    double vel_eps = 1e-3;
    double fz_eps = 1.0;
    bool precompensated = true;  // gravity/bias absent from the IMU channels
    std::vector<PhaseSpan> phases;
    // set when raw effects were embedded
    Eigen::Vector3d embedded_b_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d embedded_b_w = Eigen::Vector3d::Zero();
    Eigen::Vector3d embedded_g = Eigen::Vector3d::Zero();
};

/// Labeled synthetic trace: all channels share one uniform time grid.
struct GaitTrace {
    std::vector<ImuSample> imu;
    std::vector<ForceSample> forces;
    std::vector<Eigen::Vector3d> true_vel;
    std::vector<Eigen::Vector3d> true_angvel;
    std::vector<GroundTruthLabel> labels;
    TraceMeta meta;

    std::size_t size() const { return imu.size(); }
};

namespace detail {

struct ChannelState {
    Eigen::Vector3d accel = Eigen::Vector3d::Zero();
    Eigen::Vector3d angvel = Eigen::Vector3d::Zero();
    Eigen::Vector3d vel = Eigen::Vector3d::Zero();
    Eigen::Vector3d force = Eigen::Vector3d::Zero();
};

/// Noiseless channel values inside one phase at local time tl from the
/// phase start.
inline ChannelState phase_channels(const GaitPhase& p, double tl, double dt) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ChannelState c;
    switch (p.kind) {
        case PhaseKind::Stance:
        case PhaseKind::SoftStance: {
            // Still foot under load; a gentle weight shift keeps the
            // tangential force well inside the friction cone.
            c.force.z() = p.load;
            c.force.x() = 0.25 * p.friction.mu_s * p.load * std::sin(two_pi * tl / p.duration);
            break;
        }
        case PhaseKind::Swing: {
            const double s = tl / p.duration;
            const double T = p.duration;
            // Forward speed sin^2, vertical lift sin, pitch rate sin; the
            // profiles are staggered so no interior instant has all of
            // a_x, a_z and w_y simultaneously near zero.
            c.vel.x() = p.swing.v_forward * std::sin(std::numbers::pi * s) *
                        std::sin(std::numbers::pi * s);
            c.accel.x() = p.swing.v_forward * std::numbers::pi / T * std::sin(two_pi * s);
            c.vel.z() = p.swing.v_vertical * std::sin(two_pi * s);
            c.accel.z() = p.swing.v_vertical * two_pi / T * std::cos(two_pi * s);
            c.angvel.y() = p.swing.w_pitch * std::sin(std::numbers::pi * s);
            break;
        }
        case PhaseKind::Impact: {
            // Landing transient: F_z ramps up under a decaying oscillation
            // while the sole micro-slips; the tangential force swings
            // across the friction-cone boundary as the weight transfers.
            const double f = p.impact.osc_freq_hz;
            const double lam = p.impact.osc_decay;
            const double ramp = 1.0 - std::exp(-4.0 * tl / p.duration);
            const double osc = std::exp(-lam * tl) * std::sin(two_pi * f * tl);
            c.force.z() = p.load * ramp * (1.0 + p.impact.fz_overshoot * osc);
            c.force.x() = p.impact.tangential_frac * p.friction.mu_s * p.load * ramp * osc;
            c.vel.x() = p.impact.vel_amp * osc;
            c.accel.x() = p.impact.vel_amp * std::exp(-lam * tl) *
                          (two_pi * f * std::cos(two_pi * f * tl) -
                           lam * std::sin(two_pi * f * tl));
            c.angvel.z() = p.impact.angvel_amp * osc;
            break;
        }
        case PhaseKind::Slip: {
            // Applied shear beyond the static cone; the foot accelerates at
            // the kinetic friction deficit. Velocity starts one tick in so
            // every slip sample is labeled unstable.
            const double drive = p.slip.drive_ratio * p.friction.mu_s * p.load;
            const double accel =
                (drive - p.friction.mu_k * p.load) / p.slip.effective_mass;
            c.force.z() = p.load;
            c.force.x() = drive;  // recorded shear violates the cone throughout
            c.accel.x() = accel;
            c.vel.x() = accel * (tl + dt);
            break;
        }
    }
    return c;
}

}  // namespace detail

/// Generates a labeled trace: deterministic for a fixed seed (measurement
/// noise is the only randomness), pre-compensated IMU channels, noiseless
/// force/velocity channels, labels self-consistent with label_trace.
inline GaitTrace generate(const GaitScenario& scenario) {
    scenario.validate();
    const double dt = 1.0 / scenario.sample_rate_hz;
    const std::size_t n = scenario.total_samples();

    GaitTrace trace;
    trace.imu.reserve(n);
    trace.forces.reserve(n);
    trace.true_vel.reserve(n);
    trace.true_angvel.reserve(n);

    std::vector<double> starts(scenario.phases.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < scenario.phases.size(); ++i) {
        starts[i] = acc;
        acc += scenario.phases[i].duration;
    }

    trace.meta.name = scenario.name;
    trace.meta.seed = scenario.seed;
    trace.meta.sample_rate_hz = scenario.sample_rate_hz;
    trace.meta.sigma = scenario.noise.sigma;
    trace.meta.force_scale = scenario.force_scale;
    trace.meta.vel_eps = scenario.vel_eps;
    trace.meta.fz_eps = scenario.fz_eps;
    trace.meta.phases.reserve(scenario.phases.size());
    for (std::size_t i = 0; i < scenario.phases.size(); ++i) {
        PhaseSpan span;
        span.kind = to_string(scenario.phases[i].kind);
        span.t_begin = starts[i];
        span.t_end = starts[i] + scenario.phases[i].duration;
        span.mu_s = scenario.phases[i].friction.mu_s;
        trace.meta.phases.push_back(span);
    }

    GaussianStream noise(scenario.seed);
    std::size_t phase_idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (phase_idx + 1 < scenario.phases.size() &&
               t >= starts[phase_idx + 1])
            ++phase_idx;
        const GaitPhase& phase = scenario.phases[phase_idx];
        if (trace.meta.phases[phase_idx].n_samples == 0)
            trace.meta.phases[phase_idx].first_sample = k;
        ++trace.meta.phases[phase_idx].n_samples;

        const auto c = detail::phase_channels(phase, t - starts[phase_idx], dt);

        ImuSample imu;
        imu.t = t;
        imu.foot = scenario.foot;
        for (int i = 0; i < 3; ++i)
            imu.a[i] = c.accel[i] + scenario.noise.sigma[static_cast<std::size_t>(i)] * noise.next();
        for (int i = 0; i < 3; ++i)
            imu.w[i] =
                c.angvel[i] + scenario.noise.sigma[static_cast<std::size_t>(i) + 3] * noise.next();
        trace.imu.push_back(imu);

        ForceSample fs;
        fs.t = t;
        fs.foot = scenario.foot;
        fs.F = c.force * (scenario.force_scale * phase.force_scale);
        trace.forces.push_back(fs);

        trace.true_vel.push_back(c.vel);
        trace.true_angvel.push_back(c.angvel);
    }

    trace.labels =
        label_trace(trace.forces, trace.true_vel, trace.true_angvel, scenario.vel_eps,
                    scenario.fz_eps);
    return trace;
}

/// Rewrites the IMU channels as raw measurements: adds the constant biases
/// and the attitude-aligned gravity reaction, with the attitude integrated
/// from the true angular velocity starting at identity. Exercises the full
/// preprocessing path end to end.
inline void embed_raw_effects(GaitTrace& trace, const BiasEstimate& bias,
                              const GravityModel& gravity = GravityModel::standard()) {
    bias.validate();
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    double t_prev = trace.imu.empty() ? 0.0 : trace.imu.front().t;
    for (std::size_t k = 0; k < trace.imu.size(); ++k) {
        const double dt = trace.imu[k].t - t_prev;
        t_prev = trace.imu[k].t;
        if (dt > 0.0) {
            const Eigen::Vector3d theta = trace.true_angvel[k] * dt;
            const double angle = theta.norm();
            if (angle > 0.0) q = q * Eigen::Quaterniond(Eigen::AngleAxisd(angle, theta / angle));
            q.normalize();
        }
        trace.imu[k].a += bias.b_a + gravity_reaction(q, gravity);
        trace.imu[k].w += bias.b_w;
    }
    trace.meta.precompensated = false;
    trace.meta.embedded_b_a = bias.b_a;
    trace.meta.embedded_b_w = bias.b_w;
    trace.meta.embedded_g = gravity.g;
}

/// Built-in scenarios. stable_walk: an initial double support then three
/// footsteps on firm ground (mu_s = 0.1). slip_walk: the first footstep on
/// firm ground, the last two on a slippery surface (mu_s = 0.03) where the
/// foot shears loose. soft_walk: stable_walk with every force halved (low
/// restitution terrain; the IMU channels are bit-identical for equal
/// seeds). grease_walk: three extreme-slip footsteps (mu_s = 0.01) followed
/// by a firm recovery step.
inline std::vector<GaitScenario> builtin_scenarios() {
    std::vector<GaitScenario> all;

    const auto footstep = [](std::vector<GaitPhase>& phases, double mu_s, bool slips) {
        phases.push_back(swing_phase(0.4));
        phases.push_back(impact_phase(0.08, mu_s));
        if (slips)
            phases.push_back(slip_phase(0.5, mu_s));
        else
            phases.push_back(stance_phase(0.6, mu_s));
    };

    {
        GaitScenario s;
        s.name = "stable_walk";
        s.phases.push_back(stance_phase(0.6, 0.1));
        for (int i = 0; i < 3; ++i) footstep(s.phases, 0.1, false);
        all.push_back(std::move(s));
    }
    {
        GaitScenario s;
        s.name = "slip_walk";
        s.phases.push_back(stance_phase(0.6, 0.1));
        footstep(s.phases, 0.1, false);
        footstep(s.phases, 0.03, true);
        footstep(s.phases, 0.03, true);
        all.push_back(std::move(s));
    }
    {
        GaitScenario s;
        s.name = "soft_walk";
        s.phases.push_back(stance_phase(0.6, 0.1));
        for (int i = 0; i < 3; ++i) footstep(s.phases, 0.1, false);
        s.force_scale = 0.5;
        all.push_back(std::move(s));
    }
    {
        GaitScenario s;
        s.name = "grease_walk";
        s.phases.push_back(stance_phase(0.6, 0.1));
        for (int i = 0; i < 3; ++i) footstep(s.phases, 0.01, true);
        footstep(s.phases, 0.1, false);
        all.push_back(std::move(s));
    }
    return all;
}

inline const GaitScenario* find_builtin(const std::vector<GaitScenario>& all,
                                        const std::string& name) {
    for (const GaitScenario& s : all)
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace stancekde
