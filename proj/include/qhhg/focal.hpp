#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qhhg/common.hpp"
#include "qhhg/photonics.hpp"

namespace qhhg {

/// Intensity density g(I) = 1/(I ln(I0/Imin)) of a Gaussian beam profile
/// sampled uniformly over the focal disc area.
inline double focal_weight(double intensity, double i0, double i_min) {
    if (!(i_min > 0.0) || !(i0 > i_min))
        throw config_error("focal weight needs 0 < I_min < I0");
    if (!(intensity > i_min) || intensity > i0 * (1.0 + 1e-12))
        throw domain_error("intensity outside (I_min, I0]");
    return 1.0 / (intensity * std::log(i0 / i_min));
}

/// One row of a single-intensity sweep.
struct SweepRow {
    double intensity = 0.0;  // W/cm^2
    double e0 = 0.0;         // a.u.
    CorrelatorSet c{};
    double projection_weight = 0.0;
    std::uint64_t params_hash = 0;
};

namespace detail {

struct RawMoments {
    double n_i = 0.0, n_j = 0.0, self4_i = 0.0, self4_j = 0.0, cross4 = 0.0;
    bool finite() const {
        return std::isfinite(n_i) && std::isfinite(n_j) && std::isfinite(self4_i) &&
               std::isfinite(self4_j) && std::isfinite(cross4);
    }
};

inline RawMoments raw_of(const CorrelatorSet& c) {
    return {c.n_i, c.n_j, c.self4_i, c.self4_j, c.cross4};
}

inline RawMoments lerp(const RawMoments& a, const RawMoments& b, double t) {
    auto mix = [t](double x, double y) { return x + (y - x) * t; };
    return {mix(a.n_i, b.n_i), mix(a.n_j, b.n_j), mix(a.self4_i, b.self4_i),
            mix(a.self4_j, b.self4_j), mix(a.cross4, b.cross4)};
}

}  // namespace detail

/// Mixed-state averaged correlators at peak intensity I0: each raw moment is
/// averaged against g(I) by trapezoid quadrature on ln(I) (where the measure
/// is uniform), then the ratios are rebuilt from the averaged moments.
/// Ratios of averages, never averages of ratios.
inline CorrelatorSet averaged_observables(std::span<const SweepRow> rows, double i0,
                                          double i_min, double denom_floor = 1e-30,
                                          std::vector<std::string>* warnings = nullptr) {
    if (!(i_min > 0.0)) throw config_error("I_min must be positive");
    if (i0 < i_min * (1.0 - 1e-12)) throw range_error("I0 below I_min");

    // usable nodes, sorted, with sentinel (non-finite) rows dropped
    std::vector<std::pair<double, detail::RawMoments>> nodes;
    nodes.reserve(rows.size());
    int dropped = 0;
    for (const SweepRow& r : rows) {
        const auto raw = detail::raw_of(r.c);
        if (!raw.finite() || !(r.intensity > 0.0)) {
            ++dropped;
            continue;
        }
        nodes.emplace_back(r.intensity, raw);
    }
    if (dropped > 0 && warnings)
        warnings->push_back(std::to_string(dropped) + " sweep rows excluded from the focal "
                                                      "average (undefined entries)");
    std::sort(nodes.begin(), nodes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (nodes.empty()) throw sampling_error("no usable sweep rows");
    if (nodes.front().first > i_min * (1.0 + 1e-12) || nodes.back().first < i0 * (1.0 - 1e-12))
        throw range_error("sweep rows do not cover [I_min, I0]");

    // log-linear interpolation of the raw moments at an arbitrary intensity
    auto moments_at = [&nodes](double intensity) -> detail::RawMoments {
        const double u = std::log(intensity);
        auto it = std::lower_bound(nodes.begin(), nodes.end(), intensity,
                                   [](const auto& n, double v) { return n.first < v; });
        if (it == nodes.begin()) return it->second;
        if (it == nodes.end()) return nodes.back().second;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        if (hi.first == lo.first) return hi.second;
        const double t = (u - std::log(lo.first)) / (std::log(hi.first) - std::log(lo.first));
        return detail::lerp(lo.second, hi.second, t);
    };

    // degenerate window: the average collapses to the single-intensity row
    if (i0 <= i_min * (1.0 + 1e-12)) {
        const auto m = moments_at(i_min);
        return ratios_from_raw(m.n_i, m.n_j, m.self4_i, m.self4_j, m.cross4, denom_floor);
    }

    // quadrature nodes: swept intensities inside the window plus exact endpoints
    std::vector<std::pair<double, detail::RawMoments>> qnodes;
    qnodes.emplace_back(i_min, moments_at(i_min));
    for (const auto& n : nodes)
        if (n.first > i_min * (1.0 + 1e-12) && n.first < i0 * (1.0 - 1e-12))
            qnodes.emplace_back(n);
    qnodes.emplace_back(i0, moments_at(i0));
    if (qnodes.size() < 4)
        throw sampling_error("fewer than 4 usable intensity nodes in [I_min, I0]");

    const double log_span = std::log(i0 / i_min);
    detail::RawMoments acc{};
    for (std::size_t s = 0; s + 1 < qnodes.size(); ++s) {
        const double du = std::log(qnodes[s + 1].first / qnodes[s].first);
        const auto& a = qnodes[s].second;
        const auto& b = qnodes[s + 1].second;
        acc.n_i += 0.5 * du * (a.n_i + b.n_i);
        acc.n_j += 0.5 * du * (a.n_j + b.n_j);
        acc.self4_i += 0.5 * du * (a.self4_i + b.self4_i);
        acc.self4_j += 0.5 * du * (a.self4_j + b.self4_j);
        acc.cross4 += 0.5 * du * (a.cross4 + b.cross4);
    }
    const double inv = 1.0 / log_span;
    return ratios_from_raw(acc.n_i * inv, acc.n_j * inv, acc.self4_i * inv, acc.self4_j * inv,
                           acc.cross4 * inv, denom_floor);
}

struct FocalCurvePoint {
    double i0 = 0.0;
    CorrelatorSet c{};
};

/// Averaged observables for each requested peak intensity, reusing the same
/// single-intensity rows (each I0 only reweights them).
inline std::vector<FocalCurvePoint> r_av_curve(std::span<const SweepRow> rows,
                                               std::span<const double> i0_list, double i_min,
                                               double denom_floor = 1e-30,
                                               std::vector<std::string>* warnings = nullptr) {
    double swept_max = 0.0;
    for (const SweepRow& r : rows) swept_max = std::max(swept_max, r.intensity);
    std::vector<FocalCurvePoint> out;
    out.reserve(i0_list.size());
    for (double i0 : i0_list) {
        if (i0 > swept_max * (1.0 + 1e-12) || i0 < i_min * (1.0 - 1e-12))
            throw range_error("requested I0 outside the swept intensity range");
        out.push_back({i0, averaged_observables(rows, i0, i_min, denom_floor, warnings)});
    }
    return out;
}

}  // namespace qhhg
