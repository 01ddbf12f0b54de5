#include "semcomm/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace semcomm {

double psnr(const Tensor& x, const Tensor& xhat, double peak) {
    if (!x.same_shape(xhat))
        throw std::invalid_argument("psnr: shape mismatch " + shape_str(x.shape) + " vs " +
                                    shape_str(xhat.shape));
    if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be > 0");
    double m = mse(x, xhat);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / m);
}

double ssim_single(const Tensor& x, const Tensor& xhat, const SsimOptions& opt) {
    if (!x.same_shape(xhat))
        throw std::invalid_argument("ssim: shape mismatch " + shape_str(x.shape) + " vs " +
                                    shape_str(xhat.shape));
    if (x.ndim() != 2) throw std::invalid_argument("ssim_single: expected [H,W]");
    std::size_t H = x.shape[0], W = x.shape[1], w = opt.window;
    if (H < w || W < w)
        throw std::invalid_argument("ssim: image " + shape_str(x.shape) +
                                    " smaller than window " + std::to_string(w));
    double c1 = opt.c1(), c2 = opt.c2();
    double inv_n = 1.0 / double(w * w);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + w <= H; ++i) {
        for (std::size_t j = 0; j + w <= W; ++j) {
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (std::size_t u = 0; u < w; ++u)
                for (std::size_t v = 0; v < w; ++v) {
                    double a = x.data[(i + u) * W + j + v];
                    double b = xhat.data[(i + u) * W + j + v];
                    sx += a;
                    sy += b;
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            double mx = sx * inv_n, my = sy * inv_n;
            double vx = sxx * inv_n - mx * mx;
            double vy = syy * inv_n - my * my;
            double cov = sxy * inv_n - mx * my;
            total += (2.0 * mx * my + c1) * (2.0 * cov + c2) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return total / double(count);
}

double ssim(const Tensor& x, const Tensor& xhat, const SsimOptions& opt) {
    if (x.ndim() == 2) return ssim_single(x, xhat, opt);
    if (x.ndim() != 3) throw std::invalid_argument("ssim: expected [H,W] or [H,W,C]");
    if (!x.same_shape(xhat))
        throw std::invalid_argument("ssim: shape mismatch " + shape_str(x.shape) + " vs " +
                                    shape_str(xhat.shape));
    std::size_t H = x.shape[0], W = x.shape[1], C = x.shape[2];
    double total = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        Tensor a({H, W}), b({H, W});
        for (std::size_t i = 0; i < H * W; ++i) {
            a.data[i] = x.data[i * C + c];
            b.data[i] = xhat.data[i * C + c];
        }
        total += ssim_single(a, b, opt);
    }
    return total / double(C);
}

double ber(const BitStream& tx, const BitStream& rx) {
    if (tx.size() != rx.size())
        throw std::invalid_argument("ber: stream length mismatch " + std::to_string(tx.size()) +
                                    " vs " + std::to_string(rx.size()));
    if (tx.size() == 0) throw std::invalid_argument("ber: empty streams");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) errors += tx.bits[i] != rx.bits[i];
    return double(errors) / double(tx.size());
}

BandwidthReport bandwidth_ratio(std::uint64_t latent_bits, std::uint64_t source_bits) {
    if (latent_bits == 0 || source_bits == 0)
        throw std::invalid_argument("bandwidth_ratio: bit counts must be > 0");
    BandwidthReport r;
    r.ratio = double(latent_bits) / double(source_bits);
    // exact when 100*latent divides source evenly
    r.percent_saved = 100.0 - (100.0 * double(latent_bits)) / double(source_bits);
    return r;
}

}  // namespace semcomm
