#pragma once

#include <cstdint>

namespace semcomm {

/// Counter-based generator: output i of a stream is a pure function of
/// (key, i), so streams can be split and replayed independently.
/// Mixing function is the splitmix64 finalizer.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Derive an independent child stream; deterministic in (parent key, id).
    Rng split(std::uint64_t id) const;

    std::uint64_t next_u64();
    double uniform();                        // (0, 1)
    double uniform(double lo, double hi);
    double gaussian();                       // standard normal, Box-Muller
    double gamma(double shape, double scl);  // Marsaglia-Tsang

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_gauss_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace semcomm
