#pragma once

#include <span>
#include <vector>

#include "qhhg/common.hpp"
#include "qhhg/fft.hpp"
#include "qhhg/model.hpp"
#include "qhhg/propagation.hpp"

namespace qhhg {

enum class SpectrumWindow { None, Envelope };

inline const char* to_string(SpectrumWindow w) {
    return w == SpectrumWindow::Envelope ? "envelope" : "none";
}

inline SpectrumWindow spectrum_window_from_string(const std::string& s) {
    if (s == "envelope") return SpectrumWindow::Envelope;
    if (s == "none") return SpectrumWindow::None;
    throw config_error("unknown spectrum window '" + s + "'");
}

/// HHG power spectrum on a frequency axis in units of the laser frequency.
struct Spectrum {
    std::vector<double> harmonic_order;
    std::vector<double> power;
};

/// |omega^2 FT[<x>](omega)|^2 of the (optionally windowed) dipole record.
/// The default window is the pulse envelope itself, which confines the
/// transform to the driven interval.
inline Spectrum hhg_spectrum(const DipoleRecord& record, double omega_L,
                             SpectrumWindow window = SpectrumWindow::Envelope,
                             const EnvelopeTimes* env = nullptr, int pad_factor = 4) {
    const std::size_t n = record.times.size();
    if (n < 16 || record.dipole.size() != n)
        throw resolution_error("dipole record too short or inconsistent");
    const double dt = record.times[1] - record.times[0];
    if (!(dt > 0.0)) throw resolution_error("dipole record times must increase");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double step = record.times[i + 1] - record.times[i];
        if (std::abs(step - dt) > 1e-9 * dt)
            throw resolution_error("dipole record is not uniformly sampled");
    }
    const double span = record.times.back() - record.times.front();
    const double tau = 2.0 * kPi / omega_L;
    if (span < 4.0 * tau)
        throw resolution_error("dipole record spans fewer than 4 laser cycles");
    if (window == SpectrumWindow::Envelope && env == nullptr)
        throw config_error("envelope window requested without envelope times");

    std::size_t n_pad = 1;
    while (n_pad < n * static_cast<std::size_t>(std::max(1, pad_factor))) n_pad *= 2;
    std::vector<cdouble> x(n_pad, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const double w =
            window == SpectrumWindow::Envelope ? envelope(record.times[i], *env) : 1.0;
        x[i] = record.dipole[i] * w;
    }
    const std::array<int, 1> dims{static_cast<int>(n_pad)};
    FourierTransformer fft(std::span<const int>(dims.data(), 1));
    fft.forward(x.data());

    Spectrum out;
    const std::size_t n_half = n_pad / 2;
    out.harmonic_order.resize(n_half);
    out.power.resize(n_half);
    const double domega = 2.0 * kPi / (static_cast<double>(n_pad) * dt);
    for (std::size_t m = 0; m < n_half; ++m) {
        const double omega = domega * static_cast<double>(m);
        out.harmonic_order[m] = omega / omega_L;
        const double amp2 = std::norm(x[m] * dt);
        out.power[m] = omega * omega * omega * omega * amp2;
    }
    return out;
}

/// Largest spectral power within +-half_width harmonic orders of `order`.
inline double peak_power_near_order(const Spectrum& spec, double order,
                                    double half_width = 0.5) {
    double peak = 0.0;
    for (std::size_t m = 0; m < spec.harmonic_order.size(); ++m)
        if (std::abs(spec.harmonic_order[m] - order) <= half_width)
            peak = std::max(peak, spec.power[m]);
    return peak;
}

}  // namespace qhhg
