#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "semcomm/metrics.hpp"
#include "semcomm/rng.hpp"

using namespace semcomm;

namespace {

Tensor random_image(Shape s, Rng& rng) {
    Tensor t(std::move(s));
    for (auto& v : t.data) v = rng.uniform(0.0, 1.0);
    return t;
}

/// Direct loop transcription of mean SSIM for one channel; the implementation
/// under test must agree to rounding error.
double ssim_loop(const Tensor& x, const Tensor& y, std::size_t w, double c1, double c2) {
    std::size_t H = x.shape[0], W = x.shape[1];
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + w <= H; ++i)
        for (std::size_t j = 0; j + w <= W; ++j) {
            double mx = 0, my = 0;
            for (std::size_t a = 0; a < w; ++a)
                for (std::size_t b = 0; b < w; ++b) {
                    mx += x.at(i + a, j + b);
                    my += y.at(i + a, j + b);
                }
            double n = static_cast<double>(w * w);
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

}  // namespace

TEST_CASE("psnr closed forms") {
    Tensor x({2, 2}, {0.0, 0.0, 0.0, 0.0});

    SUBCASE("uniform squared error 1e-3 gives 30 dB") {
        Tensor y = x;
        for (auto& v : y.data) v += std::sqrt(1e-3);
        CHECK(psnr(x, y) == doctest::Approx(30.0).epsilon(1e-12));
    }
    SUBCASE("one-step error on the 8-bit scale gives ~48.13 dB") {
        Tensor y = x;
        for (auto& v : y.data) v += 1.0 / 255.0;
        CHECK(psnr(x, y) == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-12));
    }
    SUBCASE("identical images give +inf") {
        CHECK(psnr(x, x) == std::numeric_limits<double>::infinity());
    }
    SUBCASE("peak rescaling adds 20 log10(peak)") {
        Tensor y = x;
        y.data[0] = 0.1;
        CHECK(psnr(x, y, 255.0) - psnr(x, y, 1.0) ==
              doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-10));
    }
}

TEST_CASE("ssim identities and symmetry") {
    Rng rng(17);
    Tensor x = random_image({12, 12}, rng);
    CHECK(ssim_single(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    Tensor y = random_image({12, 12}, rng);
    CHECK(ssim_single(x, y) == doctest::Approx(ssim_single(y, x)).epsilon(1e-12));
    CHECK(ssim_single(x, y) < 1.0);
}

TEST_CASE("ssim against a direct loop transcription") {
    Rng rng(23);
    SsimOptions opt;
    Tensor x = random_image({14, 11}, rng);
    Tensor y = random_image({14, 11}, rng);
    double ref = ssim_loop(x, y, opt.window, opt.c1(), opt.c2());
    CHECK(ssim_single(x, y, opt) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("multichannel ssim averages the per-channel scores") {
    Rng rng(29);
    Tensor x = random_image({10, 10, 3}, rng);
    Tensor y = random_image({10, 10, 3}, rng);
    double acc = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        Tensor xc({10, 10}), yc({10, 10});
        for (std::size_t i = 0; i < 100; ++i) {
            xc.data[i] = x.data[i * 3 + c];
            yc.data[i] = y.data[i * 3 + c];
        }
        acc += ssim_single(xc, yc);
    }
    CHECK(ssim(x, y) == doctest::Approx(acc / 3.0).epsilon(1e-12));
}

TEST_CASE("ssim degrades monotonically with additive noise") {
    Rng rng(31);
    Tensor x = random_image({16, 16}, rng);
    double prev = 1.0;
    for (double sigma : {0.02, 0.08, 0.25}) {
        Tensor y = x;
        Rng noise(5);
        for (auto& v : y.data) v += sigma * noise.gaussian();
        double s = ssim_single(x, y);
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("bit error rate") {
    BitStream a{{0, 1, 0, 1, 1, 0, 0, 1}};
    CHECK(ber(a, a) == 0.0);
    BitStream b = a;
    b.bits[0] ^= 1;
    b.bits[5] ^= 1;
    CHECK(ber(a, b) == doctest::Approx(0.25).epsilon(1e-15));
    BitStream inv = a;
    for (auto& bit : inv.bits) bit ^= 1;
    CHECK(ber(a, inv) == 1.0);
    CHECK_THROWS_AS(ber(a, BitStream{{0, 1}}), std::invalid_argument);
}

TEST_CASE("bandwidth accounting") {
    SUBCASE("equal sizes") {
        BandwidthReport r = bandwidth_ratio(64 * 12 * 32, 64 * 12 * 32);
        CHECK(r.ratio == 1.0);
        CHECK(r.percent_saved == 0.0);
    }
    SUBCASE("exact 72 percent saved") {
        // 20x20x3 image at 8 bpp vs 4 tokens x 21 floats at 32 bpv
        std::uint64_t source = 20 * 20 * 3 * 8;
        std::uint64_t latent = 4 * 21 * 32;
        BandwidthReport r = bandwidth_ratio(latent, source);
        CHECK(r.ratio == doctest::Approx(0.28).epsilon(1e-15));
        CHECK(r.percent_saved == 72.0);
    }
    SUBCASE("expansion is reported as negative saving") {
        BandwidthReport r = bandwidth_ratio(200, 100);
        CHECK(r.ratio == 2.0);
        CHECK(r.percent_saved == -100.0);
    }
    CHECK_THROWS_AS(bandwidth_ratio(1, 0), std::invalid_argument);
}
