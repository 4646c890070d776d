#pragma once

#include <string>
#include <vector>

#include "qhhg/common.hpp"

namespace qhhg {

/// Uniform 1D grid axis. The default layout is symmetric about zero with
/// coordinates (i - n/2) * spacing, so a point sits exactly at the origin.
struct Axis {
    int n_points = 0;
    double spacing = 0.0;
    double origin = 0.0;  // coordinate of the first point

    static Axis centered(int n, double dx) {
        Axis a{n, dx, -0.5 * n * dx};
        a.validate();
        return a;
    }

    void validate() const {
        if (n_points < 8 || n_points % 2 != 0)
            throw config_error("axis needs an even point count >= 8, got " +
                               std::to_string(n_points));
        if (!(spacing > 0.0)) throw config_error("axis spacing must be positive");
    }

    double coordinate(int i) const { return origin + i * spacing; }
    double length() const { return n_points * spacing; }
    double max_abs_coordinate() const {
        const double lo = std::abs(coordinate(0));
        const double hi = std::abs(coordinate(n_points - 1));
        return lo > hi ? lo : hi;
    }

    /// Wavenumber for FFT bin i (standard DFT ordering, negative half mapped
    /// to the upper bins).
    double wavenumber(int i) const {
        const int m = (i <= n_points / 2 - 1) ? i : i - n_points;
        return 2.0 * kPi * m / length();
    }

    std::vector<double> coordinates() const {
        std::vector<double> xs(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i) xs[static_cast<std::size_t>(i)] = coordinate(i);
        return xs;
    }

    std::vector<double> wavenumbers() const {
        std::vector<double> ks(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i) ks[static_cast<std::size_t>(i)] = wavenumber(i);
        return ks;
    }

    bool operator==(const Axis&) const = default;
};

}  // namespace qhhg
