#pragma once

#include "semcomm/modem.hpp"
#include "semcomm/tensor.hpp"

namespace semcomm {

/// 10 log10(peak^2 / MSE); +inf for identical inputs (callers cap for tables).
double psnr(const Tensor& x, const Tensor& xhat, double peak = 1.0);

struct SsimOptions {
    std::size_t window = 8;  // uniform square window, stride 1
    double range = 1.0;      // L
    double c1() const { return (0.01 * range) * (0.01 * range); }
    double c2() const { return (0.03 * range) * (0.03 * range); }
};

/// Mean SSIM over sliding windows of a single-channel [H,W] image pair.
double ssim_single(const Tensor& x, const Tensor& xhat, const SsimOptions& opt = {});

/// [H,W] or [H,W,C]; multichannel is computed per channel and averaged.
double ssim(const Tensor& x, const Tensor& xhat, const SsimOptions& opt = {});

/// Hamming distance / length.
double ber(const BitStream& tx, const BitStream& rx);

struct BandwidthReport {
    double ratio = 1.0;          // latent_bits / source_bits
    double percent_saved = 0.0;  // 100 (1 - ratio)
};

BandwidthReport bandwidth_ratio(std::uint64_t latent_bits, std::uint64_t source_bits);

}  // namespace semcomm
