#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "stancekde/types.hpp"

namespace stancekde {

/// Ground reaction force in N: F.x(), F.y() lateral, F.z() normal.
struct ForceSample {
    double t = 0.0;
    Eigen::Vector3d F = Eigen::Vector3d::Zero();
    Foot foot = Foot::R;

    void validate() const {
        if (!std::isfinite(t) || !F.allFinite())
            throw ValidationError("ForceSample: non-finite component");
    }
};

/// Dry-friction coefficients; kinetic never exceeds static (equality
/// admitted for simple scenarios). Friction forces are mu * F_z.
struct FrictionModel {
    double mu_s = 0.1;
    double mu_k = 0.08;

    FrictionModel() = default;
    FrictionModel(double static_mu, double kinetic_mu) : mu_s(static_mu), mu_k(kinetic_mu) {
        validate();
    }

    void validate() const {
        if (!(mu_k > 0.0) || !(mu_k <= mu_s) || !std::isfinite(mu_s))
            throw ValidationError("FrictionModel: need 0 < mu_k <= mu_s");
    }
};

struct GroundTruthLabel {
    double t = 0.0;
    Foot foot = Foot::R;
    bool stable = false;
    bool in_contact = false;  // stable implies in_contact
};

/// Coulomb dry-friction stability: the tangential force must fit inside the
/// friction cone and the foot must be loaded.
/// true iff sqrt(F_x^2 + F_y^2) <= mu_s * F_z and F_z > 0.
inline bool coulomb_stable(const ForceSample& f, double mu_s) {
    if (!(mu_s > 0.0)) throw ValidationError("coulomb_stable: mu_s must be positive");
    return f.F.z() > 0.0 && std::hypot(f.F.x(), f.F.y()) <= mu_s * f.F.z();
}

/// Labels a time-aligned trace: in_contact when the normal force exceeds
/// fz_eps; stable when additionally the true linear and angular sole
/// velocities are within vel_eps of zero.
inline std::vector<GroundTruthLabel> label_trace(std::span<const ForceSample> forces,
                                                 std::span<const Eigen::Vector3d> velocities,
                                                 std::span<const Eigen::Vector3d> angular,
                                                 double vel_eps, double fz_eps) {
    if (forces.size() != velocities.size() || forces.size() != angular.size())
        throw ValidationError("label_trace: misaligned sequence lengths");
    if (!(vel_eps >= 0.0) || !(fz_eps >= 0.0))
        throw ValidationError("label_trace: tolerances must be non-negative");
    std::vector<GroundTruthLabel> labels;
    labels.reserve(forces.size());
    for (std::size_t i = 0; i < forces.size(); ++i) {
        GroundTruthLabel l;
        l.t = forces[i].t;
        l.foot = forces[i].foot;
        l.in_contact = forces[i].F.z() > fz_eps;
        l.stable = l.in_contact && velocities[i].norm() <= vel_eps &&
                   angular[i].norm() <= vel_eps;
        labels.push_back(l);
    }
    return labels;
}

/// Double-threshold hysteresis over the vertical GRF: flips on when
/// F_z > high, off when F_z < low, holds in between.
inline std::vector<bool> schmitt_contact(std::span<const double> fz_series, double high,
                                         double low, bool initial) {
    if (!(low < high)) throw ValidationError("schmitt_contact: low must be < high");
    std::vector<bool> out;
    out.reserve(fz_series.size());
    bool state = initial;
    for (double fz : fz_series) {
        if (fz > high)
            state = true;
        else if (fz < low)
            state = false;
        out.push_back(state);
    }
    return out;
}

}  // namespace stancekde
