#include "semcomm/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace semcomm {

FadingFamily fading_family_from_string(const std::string& s) {
    if (s == "none") return FadingFamily::none;
    if (s == "awgn" || s == "awgn-only") return FadingFamily::awgn_only;
    if (s == "rayleigh") return FadingFamily::rayleigh;
    if (s == "rician") return FadingFamily::rician;
    if (s == "nakagami") return FadingFamily::nakagami;
    throw std::invalid_argument("unknown channel family: " + s);
}

std::string to_string(FadingFamily f) {
    switch (f) {
        case FadingFamily::none: return "none";
        case FadingFamily::awgn_only: return "awgn";
        case FadingFamily::rayleigh: return "rayleigh";
        case FadingFamily::rician: return "rician";
        case FadingFamily::nakagami: return "nakagami";
    }
    return "?";
}

void ChannelConfig::validate() const {
    if (k_factor < 0.0) throw std::invalid_argument("channel: K-factor must be >= 0");
    if (family == FadingFamily::nakagami) {
        if (m < 0.5) throw std::invalid_argument("channel: nakagami m must be >= 0.5");
        if (omega <= 0.0) throw std::invalid_argument("channel: nakagami omega must be > 0");
    }
    if (noise_sigma < 0.0) throw std::invalid_argument("channel: noise sigma must be >= 0");
    if (block_length < 1) throw std::invalid_argument("channel: block_length must be >= 1");
    if (gain <= 0.0) throw std::invalid_argument("channel: gain must be > 0");
}

std::complex<double> sample_rayleigh(Rng& rng) {
    return {rng.gaussian() * M_SQRT1_2, rng.gaussian() * M_SQRT1_2};
}

std::complex<double> sample_rician(double k_factor, Rng& rng) {
    if (k_factor < 0.0) throw std::invalid_argument("sample_rician: K must be >= 0");
    double los = std::sqrt(k_factor / (k_factor + 1.0));
    double scatter = std::sqrt(1.0 / (k_factor + 1.0));
    return std::complex<double>(los, 0.0) + scatter * sample_rayleigh(rng);
}

double sample_nakagami(double m, double omega, Rng& rng) {
    if (m < 0.5) throw std::invalid_argument("sample_nakagami: m must be >= 0.5");
    if (omega <= 0.0) throw std::invalid_argument("sample_nakagami: omega must be > 0");
    // power r^2 ~ Gamma(shape m, scale omega/m), so E[r^2] = omega
    return std::sqrt(rng.gamma(m, omega / m));
}

double bessel_i0(double x) {
    x = std::abs(x);
    double half = 0.5 * x;
    double term = 1.0;
    double sum = 1.0;
    // term_k = (x/2)^(2k) / (k!)^2; all positive, no cancellation
    for (int k = 1; k < 400; ++k) {
        term *= (half / double(k)) * (half / double(k));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double pdf_eval(FadingFamily family, const PdfParams& p, double r) {
    switch (family) {
        case FadingFamily::rayleigh: {
            if (p.sigma <= 0.0) throw std::invalid_argument("pdf: sigma must be > 0");
            if (r < 0.0) return 0.0;
            double s2 = p.sigma * p.sigma;
            return r / s2 * std::exp(-r * r / (2.0 * s2));
        }
        case FadingFamily::rician: {
            if (p.k_factor < 0.0) throw std::invalid_argument("pdf: K must be >= 0");
            if (r < 0.0) return 0.0;
            // unit-power parameterization: nu^2 = K/(K+1), 2 sigma^2 = 1/(K+1)
            double s2 = 0.5 / (p.k_factor + 1.0);
            double nu = std::sqrt(p.k_factor / (p.k_factor + 1.0));
            double arg = r * nu / s2;
            // exp-scaled to avoid overflow of I0 at large K
            return r / s2 * std::exp(-(r * r + nu * nu) / (2.0 * s2) + arg) *
                   (bessel_i0(arg) * std::exp(-arg));
        }
        case FadingFamily::nakagami: {
            if (p.m < 0.5) throw std::invalid_argument("pdf: nakagami m must be >= 0.5");
            if (p.omega <= 0.0) throw std::invalid_argument("pdf: nakagami omega must be > 0");
            if (r < 0.0) return 0.0;
            if (r == 0.0) return p.m == 0.5 ? pdf_eval(family, p, 1e-300) : 0.0;
            double logp = std::log(2.0) + p.m * std::log(p.m) - std::lgamma(p.m) -
                          p.m * std::log(p.omega) + (2.0 * p.m - 1.0) * std::log(r) -
                          p.m * r * r / p.omega;
            return std::exp(logp);
        }
        case FadingFamily::awgn_only:
        case FadingFamily::none: {
            if (p.sigma <= 0.0) throw std::invalid_argument("pdf: sigma must be > 0");
            double s2 = p.sigma * p.sigma;
            return std::exp(-r * r / (2.0 * s2)) / std::sqrt(2.0 * M_PI * s2);
        }
    }
    throw std::invalid_argument("pdf: unknown family");
}

double pdf_cdf(FadingFamily family, const PdfParams& p, double r, double lo, std::size_t steps) {
    if (r <= lo) return 0.0;
    if (steps % 2) ++steps;
    double h = (r - lo) / double(steps);
    double sum = pdf_eval(family, p, lo) + pdf_eval(family, p, r);
    for (std::size_t i = 1; i < steps; ++i)
        sum += pdf_eval(family, p, lo + h * double(i)) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

std::pair<std::vector<std::complex<double>>, ChannelRealization> apply_channel(
    const std::vector<double>& symbols, const ChannelConfig& config, std::uint64_t seed) {
    config.validate();
    Rng fading_rng(seed, 1);
    Rng noise_rng(seed, 2);
    Rng phase_rng(seed, 3);

    std::size_t n = symbols.size();
    std::size_t nblocks = n == 0 ? 0 : (n + config.block_length - 1) / config.block_length;

    ChannelRealization real;
    real.block_length = config.block_length;
    real.h_blocks.reserve(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) {
        std::complex<double> h(1.0, 0.0);
        switch (config.family) {
            case FadingFamily::none:
            case FadingFamily::awgn_only: break;
            case FadingFamily::rayleigh: h = sample_rayleigh(fading_rng); break;
            case FadingFamily::rician: h = sample_rician(config.k_factor, fading_rng); break;
            case FadingFamily::nakagami: {
                // amplitude-only model; independent uniform phase makes h complex
                double r = sample_nakagami(config.m, config.omega, fading_rng) /
                           std::sqrt(config.omega);
                double phi = phase_rng.uniform(0.0, 2.0 * M_PI);
                h = std::polar(r, phi);
                break;
            }
        }
        real.h_blocks.push_back(config.gain * h);
    }

    std::vector<std::complex<double>> y(n);
    real.noise.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> nz(0.0, 0.0);
        if (config.noise_sigma > 0.0)
            nz = {config.noise_sigma * noise_rng.gaussian(),
                  config.noise_sigma * noise_rng.gaussian()};
        real.noise[i] = nz;
        y[i] = real.h_at(i) * symbols[i] + nz;
    }
    return {std::move(y), std::move(real)};
}

}  // namespace semcomm
