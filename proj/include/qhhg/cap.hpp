#pragma once

#include <vector>

#include "qhhg/axis.hpp"
#include "qhhg/common.hpp"

namespace qhhg {

/// Complex absorbing layer at both ends of an axis. Purely negative-imaginary
/// potential, here realized as a per-step multiplicative mask exp(-Gamma*dt)
/// with Gamma = strength * sin^2(pi/2 * depth/width).
struct CapSpec {
    double width = 16.0;    // layer thickness measured from each box edge (a.u.)
    double strength = 0.5;  // peak absorption rate (a.u. energy)

    void validate_for(const Axis& axis) const {
        if (!(strength > 0.0)) throw config_error("CAP strength must be positive");
        if (!(width > 0.0) || width >= 0.5 * axis.length())
            throw config_error("CAP width must be positive and below half the axis length");
    }
};

/// Absorption rate Gamma(x) of the edge CAP; zero outside the layer.
inline double cap_rate(double coord, double edge_abs, const CapSpec& cap) {
    const double depth = std::abs(coord) - (edge_abs - cap.width);
    if (depth <= 0.0) return 0.0;
    const double s = std::min(depth / cap.width, 1.0);
    const double ramp = std::sin(0.5 * kPi * s);
    return cap.strength * ramp * ramp;
}

/// Per-step mask exp(-Gamma(x)*dt) for the edge CAP on one axis.
inline std::vector<double> cap_mask(const Axis& axis, const CapSpec& cap, double dt) {
    cap.validate_for(axis);
    const double edge = axis.max_abs_coordinate();
    std::vector<double> mask(static_cast<std::size_t>(axis.n_points));
    for (int i = 0; i < axis.n_points; ++i)
        mask[static_cast<std::size_t>(i)] = std::exp(-cap_rate(axis.coordinate(i), edge, cap) * dt);
    return mask;
}

/// Additional absorbing mask starting at |x| = L_Q, ramping to full strength
/// over `ramp` and staying flat beyond. Removes trajectories that wander past
/// the quiver excursion.
inline std::vector<double> quiver_mask(const Axis& axis, double quiver_length, double ramp,
                                       double strength, double dt) {
    if (!(quiver_length > 0.0)) throw config_error("quiver length must be positive");
    if (!(ramp > 0.0) || !(strength > 0.0))
        throw config_error("quiver mask ramp and strength must be positive");
    std::vector<double> mask(static_cast<std::size_t>(axis.n_points), 1.0);
    for (int i = 0; i < axis.n_points; ++i) {
        const double depth = std::abs(axis.coordinate(i)) - quiver_length;
        if (depth <= 0.0) continue;
        const double s = std::min(depth / ramp, 1.0);
        const double r = std::sin(0.5 * kPi * s);
        mask[static_cast<std::size_t>(i)] = std::exp(-strength * r * r * dt);
    }
    return mask;
}

}  // namespace qhhg
