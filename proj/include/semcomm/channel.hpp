#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "semcomm/rng.hpp"

namespace semcomm {

enum class FadingFamily { none, awgn_only, rayleigh, rician, nakagami };

FadingFamily fading_family_from_string(const std::string& s);
std::string to_string(FadingFamily f);

/// Fading family plus its parameters. All fading samplers are unit power:
/// E[|h|^2] = 1 (Nakagami normalized by omega when used as a channel).
struct ChannelConfig {
    FadingFamily family = FadingFamily::awgn_only;
    double k_factor = 0.0;     // rician, >= 0
    double m = 1.0;            // nakagami, >= 0.5
    double omega = 1.0;        // nakagami mean power, > 0
    double noise_sigma = 0.0;  // per-component AWGN std dev, >= 0
    std::size_t block_length = 1024;  // symbols per fading draw
    double gain = 1.0;         // scalar average-gain multiplier (pathloss knob)

    void validate() const;
};

/// One sampled channel: a coefficient per fading block and the noise draws.
/// Reproducible exactly from (seed, config).
struct ChannelRealization {
    std::vector<std::complex<double>> h_blocks;
    std::vector<std::complex<double>> noise;
    std::size_t block_length = 1;

    const std::complex<double>& h_at(std::size_t symbol) const {
        return h_blocks[symbol / block_length];
    }
};

// Samplers. E[|h|^2] = 1 for rayleigh/rician; nakagami returns the amplitude
// with E[r^2] = omega.
std::complex<double> sample_rayleigh(Rng& rng);
std::complex<double> sample_rician(double k_factor, Rng& rng);
double sample_nakagami(double m, double omega, Rng& rng);

/// Modified Bessel function of the first kind, order zero (power series;
/// adequate to ~1e-13 relative for arguments in [0, 60]).
double bessel_i0(double x);

struct PdfParams {
    double sigma = 1.0;   // rayleigh scale / gaussian std dev
    double k_factor = 0.0;
    double m = 1.0;
    double omega = 1.0;
};

/// Closed-form densities. Fading families are amplitude densities on r >= 0;
/// the gaussian family is the AWGN noise density on the real line.
/// Rician uses the unit-power parameterization implied by the K-factor.
double pdf_eval(FadingFamily family, const PdfParams& p, double r);

/// CDF obtained by composite-Simpson integration of pdf_eval on [lo, r].
double pdf_cdf(FadingFamily family, const PdfParams& p, double r, double lo = 0.0,
               std::size_t steps = 4096);

/// y_i = h_block(i) * s_i + n_i, h = 1 for awgn-only/none, n complex Gaussian
/// with per-component variance sigma^2. Deterministic in (config, seed).
std::pair<std::vector<std::complex<double>>, ChannelRealization> apply_channel(
    const std::vector<double>& symbols, const ChannelConfig& config, std::uint64_t seed);

}  // namespace semcomm
