#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qhhg {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// One atomic unit of intensity expressed in W/cm^2.
inline constexpr double kAtomicIntensityWcm2 = 3.50945e16;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct shape_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct range_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct relaxation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct projection_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resolution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct sampling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sentinel for observables whose denominator vanished. Never +-inf.
inline double undefined_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_defined(double v) { return !std::isnan(v); }

/// Deterministic pairwise reduction. The summation tree depends only on the
/// element count, so results are bit-reproducible for a fixed input layout.
template <typename T>
T pairwise_sum(std::span<const T> v) {
    if (v.size() <= 32) {
        T acc{};
        for (const T& x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// FNV-1a 64-bit content hash, used to tag outputs with the exact
/// parameter set that produced them.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace qhhg
