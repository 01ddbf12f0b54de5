#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "semcomm/tensor.hpp"

namespace semcomm::testutil {

/// Direct loop transcription of mean SSIM for one channel (uniform window,
/// stride 1); independent oracle for the library implementation.
inline double ssim_reference(const Tensor& x, const Tensor& y, std::size_t w, double c1,
                             double c2) {
    std::size_t H = x.shape[0], W = x.shape[1];
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + w <= H; ++i)
        for (std::size_t j = 0; j + w <= W; ++j) {
            double mx = 0, my = 0;
            double n = static_cast<double>(w * w);
            for (std::size_t a = 0; a < w; ++a)
                for (std::size_t b = 0; b < w; ++b) {
                    mx += x.at(i + a, j + b);
                    my += y.at(i + a, j + b);
                }
            mx /= n;
            my /= n;
            double vx = 0, vy = 0, cov = 0;
            for (std::size_t a = 0; a < w; ++a)
                for (std::size_t b = 0; b < w; ++b) {
                    double dx = x.at(i + a, j + b) - mx;
                    double dy = y.at(i + a, j + b) - my;
                    vx += dx * dx;
                    vy += dy * dy;
                    cov += dx * dy;
                }
            vx /= n;
            vy /= n;
            cov /= n;
            acc += ((2 * mx * my + c1) * (2 * cov + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return acc / count;
}

/// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} e^{-2k^2x^2}.
inline double kolmogorov_q(double x) {
    if (x < 1e-8) return 1.0;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::exp(-2.0 * k * k * x * x);
        q += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

/// One-sample KS statistic; sorts a copy of the samples.
inline double ks_one_sample(std::vector<double> samples,
                            const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

/// Two-sample KS p-value via the asymptotic distribution.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        double fa = static_cast<double>(i) / a.size();
        double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    return kolmogorov_q(std::sqrt(ne) * d);
}

/// Cumulative-trapezoid CDF table over [0, hi] with linear interpolation;
/// cheap enough to evaluate per sample in KS loops.
class CdfTable {
public:
    CdfTable(const std::function<double(double)>& pdf, double hi, std::size_t points = 1 << 18)
        : hi_(hi), table_(points + 1, 0.0) {
        double dx = hi / points;
        double prev = pdf(0.0);
        for (std::size_t i = 1; i <= points; ++i) {
            double cur = pdf(i * dx);
            table_[i] = table_[i - 1] + 0.5 * (prev + cur) * dx;
            prev = cur;
        }
    }

    double operator()(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= hi_) return table_.back();
        double pos = x / hi_ * (table_.size() - 1);
        std::size_t i = static_cast<std::size_t>(pos);
        double frac = pos - i;
        return table_[i] * (1.0 - frac) + table_[i + 1] * frac;
    }

private:
    double hi_;
    std::vector<double> table_;
};

}  // namespace semcomm::testutil
