#include "semcomm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace semcomm {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream * kGolden + 0x123456789abcdefULL))) {}

Rng Rng::split(std::uint64_t id) const {
    Rng child(key_, id + 1);
    return child;
}

std::uint64_t Rng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double Rng::uniform() {
    // 53-bit mantissa, offset by half an ulp so 0 is never returned
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_gauss_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_gauss_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

double Rng::gamma(double shape, double scl) {
    if (shape <= 0.0 || scl <= 0.0) throw std::invalid_argument("gamma: shape and scale must be > 0");
    if (shape < 1.0) {
        // boost to shape+1, then scale by U^(1/shape)
        double g = gamma(shape + 1.0, 1.0);
        return scl * g * std::pow(uniform(), 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = gaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return scl * d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scl * d * v;
    }
}

}  // namespace semcomm
