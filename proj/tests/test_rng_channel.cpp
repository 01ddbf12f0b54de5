#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "common.hpp"
#include "semcomm/channel.hpp"
#include "semcomm/metrics.hpp"
#include "semcomm/modem.hpp"
#include "semcomm/rng.hpp"

using namespace semcomm;
using namespace semcomm::testutil;

TEST_CASE("rng streams are deterministic and independent") {
    Rng a(123, 5), b(123, 5), c(123, 6);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        std::uint64_t x = a.next_u64();
        all_equal &= (x == b.next_u64());
        any_diff |= (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
    Rng child1 = Rng(123, 5).split(9);
    Rng child2 = Rng(123, 5).split(9);
    CHECK(child1.next_u64() == child2.next_u64());
}

TEST_CASE("uniform and gaussian moments") {
    Rng rng(7);
    const int n = 1'000'000;
    double usum = 0, usq = 0, gsum = 0, gsq = 0, g4 = 0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        usum += u;
        usq += u * u;
        double g = rng.gaussian();
        gsum += g;
        gsq += g * g;
        g4 += g * g * g * g;
    }
    CHECK(usum / n == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(usq / n - 0.25 == doctest::Approx(1.0 / 12.0).epsilon(1e-2));
    CHECK(std::abs(gsum / n) < 5e-3);
    CHECK(gsq / n == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(g4 / n == doctest::Approx(3.0).epsilon(2e-2));
}

TEST_CASE("gamma sampler matches shape/scale moments") {
    Rng rng(11);
    for (double shape : {0.5, 1.0, 2.0, 4.5}) {
        double scl = 1.5;
        const int n = 400'000;
        double sum = 0, sq = 0;
        for (int i = 0; i < n; ++i) {
            double g = rng.gamma(shape, scl);
            CHECK(g > 0.0);
            sum += g;
            sq += g * g;
        }
        double mean = sum / n;
        double var = sq / n - mean * mean;
        CHECK(mean == doctest::Approx(shape * scl).epsilon(1e-2));
        CHECK(var == doctest::Approx(shape * scl * scl).epsilon(3e-2));
    }
}

TEST_CASE("bessel_i0 agrees with std::cyl_bessel_i on [0, 60]") {
    CHECK(bessel_i0(0.0) == 1.0);
    for (int i = 1; i <= 600; ++i) {
        double x = i * 0.1;
        double ref = std::cyl_bessel_i(0.0, x);
        CHECK(std::abs(bessel_i0(x) - ref) / ref < 1e-10);
    }
}

TEST_CASE("closed-form density spot values") {
    PdfParams p;
    p.sigma = 1.0;
    CHECK(pdf_eval(FadingFamily::rayleigh, p, 1.0) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(pdf_eval(FadingFamily::rayleigh, p, 0.0) == 0.0);
    // rician K=0 reduces to unit-power rayleigh (sigma^2 = 1/2)
    PdfParams k0;
    k0.k_factor = 0.0;
    CHECK(pdf_eval(FadingFamily::rician, k0, 0.7) ==
          doctest::Approx(2.0 * 0.7 * std::exp(-0.49)).epsilon(1e-12));
    // nakagami m=1 omega=1 is the same curve
    PdfParams m1;
    m1.m = 1.0;
    m1.omega = 1.0;
    CHECK(pdf_eval(FadingFamily::nakagami, m1, 0.7) ==
          doctest::Approx(2.0 * 0.7 * std::exp(-0.49)).epsilon(1e-12));
    // gaussian: standard normal at 0
    PdfParams g;
    g.sigma = 1.0;
    CHECK(pdf_eval(FadingFamily::awgn_only, g, 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("densities integrate to one") {
    PdfParams ray;
    ray.sigma = std::sqrt(0.5);
    CHECK(pdf_cdf(FadingFamily::rayleigh, ray, 10.0) == doctest::Approx(1.0).epsilon(1e-8));
    PdfParams ric;
    ric.k_factor = 4.0;
    CHECK(pdf_cdf(FadingFamily::rician, ric, 10.0) == doctest::Approx(1.0).epsilon(1e-8));
    PdfParams nak;
    nak.m = 2.5;
    nak.omega = 1.0;
    CHECK(pdf_cdf(FadingFamily::nakagami, nak, 10.0) == doctest::Approx(1.0).epsilon(1e-8));
    PdfParams half;
    half.m = 0.5;
    half.omega = 1.0;
    CHECK(pdf_cdf(FadingFamily::nakagami, half, 12.0) == doctest::Approx(1.0).epsilon(1e-6));
    PdfParams g;
    g.sigma = 2.0;
    CHECK(pdf_cdf(FadingFamily::awgn_only, g, 12.0, -12.0) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("sampler moments: unit power and known mean amplitudes") {
    const int n = 1'000'000;
    Rng rng(2718);
    double ray_p = 0, ray_a = 0, ric_p = 0, nak_p = 0, nak_a = 0;
    double k = 3.0, m = 2.0, omega = 1.0;
    for (int i = 0; i < n; ++i) {
        auto h = sample_rayleigh(rng);
        ray_p += std::norm(h);
        ray_a += std::abs(h);
        ric_p += std::norm(sample_rician(k, rng));
        double r = sample_nakagami(m, omega, rng);
        nak_p += r * r;
        nak_a += r;
    }
    CHECK(ray_p / n == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(ric_p / n == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(nak_p / n == doctest::Approx(omega).epsilon(5e-3));
    // E[|h|] for unit-power rayleigh = sqrt(pi)/2
    CHECK(ray_a / n == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(5e-3));
    // E[r] for nakagami(m, omega) = Gamma(m + 1/2)/Gamma(m) * sqrt(omega/m)
    double expect = std::tgamma(m + 0.5) / std::tgamma(m) * std::sqrt(omega / m);
    CHECK(nak_a / n == doctest::Approx(expect).epsilon(5e-3));
}

TEST_CASE("one-sample KS: sampled amplitudes match the closed-form densities") {
    const int n = 1'000'000;
    Rng rng(99);

    SUBCASE("rayleigh") {
        PdfParams p;
        p.sigma = std::sqrt(0.5);
        CdfTable cdf([&](double r) { return pdf_eval(FadingFamily::rayleigh, p, r); }, 8.0);
        std::vector<double> s(n);
        for (auto& v : s) v = std::abs(sample_rayleigh(rng));
        CHECK(ks_one_sample(std::move(s), cdf) < 0.002);
    }
    SUBCASE("rician K=5") {
        PdfParams p;
        p.k_factor = 5.0;
        CdfTable cdf([&](double r) { return pdf_eval(FadingFamily::rician, p, r); }, 8.0);
        std::vector<double> s(n);
        for (auto& v : s) v = std::abs(sample_rician(5.0, rng));
        CHECK(ks_one_sample(std::move(s), cdf) < 0.002);
    }
    SUBCASE("nakagami m=3") {
        PdfParams p;
        p.m = 3.0;
        p.omega = 1.0;
        CdfTable cdf([&](double r) { return pdf_eval(FadingFamily::nakagami, p, r); }, 8.0);
        std::vector<double> s(n);
        for (auto& v : s) v = sample_nakagami(3.0, 1.0, rng);
        CHECK(ks_one_sample(std::move(s), cdf) < 0.002);
    }
}

TEST_CASE("two-sample KS: family identities") {
    const int n = 200'000;
    Rng rng(55);
    std::vector<double> ray(n), ric0(n), nak1(n);
    for (int i = 0; i < n; ++i) {
        ray[i] = std::abs(sample_rayleigh(rng));
        ric0[i] = std::abs(sample_rician(0.0, rng));
        nak1[i] = sample_nakagami(1.0, 1.0, rng);
    }
    CHECK(ks_two_sample_p(ray, ric0) > 0.01);
    CHECK(ks_two_sample_p(ray, nak1) > 0.01);
    // sanity: the test can tell genuinely different families apart
    std::vector<double> ric9(n);
    for (int i = 0; i < n; ++i) ric9[i] = std::abs(sample_rician(9.0, rng));
    CHECK(ks_two_sample_p(ray, ric9) < 1e-6);
}

TEST_CASE("apply_channel structure") {
    std::vector<double> s(4096, 1.0);

    SUBCASE("deterministic in (config, seed)") {
        ChannelConfig c;
        c.family = FadingFamily::rayleigh;
        c.noise_sigma = 0.3;
        c.block_length = 64;
        auto [y1, r1] = apply_channel(s, c, 42);
        auto [y2, r2] = apply_channel(s, c, 42);
        auto [y3, r3] = apply_channel(s, c, 43);
        CHECK(y1 == y2);
        CHECK(r1.h_blocks == r2.h_blocks);
        CHECK(y1 != y3);
    }
    SUBCASE("awgn-only has unit coefficients and the stated noise power") {
        ChannelConfig c;
        c.noise_sigma = 0.5;
        auto [y, r] = apply_channel(s, c, 1);
        for (const auto& h : r.h_blocks) CHECK(h == std::complex<double>(1.0, 0.0));
        double p = 0;
        for (std::size_t i = 0; i < s.size(); ++i) p += std::norm(y[i] - s[i]);
        CHECK(p / s.size() == doctest::Approx(2.0 * 0.25).epsilon(0.1));
    }
    SUBCASE("noiseless none family is the identity") {
        ChannelConfig c;
        c.family = FadingFamily::none;
        auto [y, r] = apply_channel(s, c, 9);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(y[i] == std::complex<double>(1.0, 0.0));
    }
    SUBCASE("coefficients are constant within a block, fresh across blocks") {
        ChannelConfig c;
        c.family = FadingFamily::rayleigh;
        c.block_length = 256;
        auto [y, r] = apply_channel(s, c, 5);
        CHECK(r.h_blocks.size() == 16);
        CHECK(r.h_at(0) == r.h_at(255));
        CHECK(r.h_at(255) != r.h_at(256));
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(std::abs(y[i] - r.h_at(i)) < 1e-12);
    }
    SUBCASE("gain scales the coefficients") {
        ChannelConfig c;
        c.family = FadingFamily::rayleigh;
        c.block_length = 16;
        ChannelConfig cg = c;
        cg.gain = 0.25;
        auto [y1, r1] = apply_channel(s, c, 77);
        auto [y2, r2] = apply_channel(s, cg, 77);
        for (std::size_t i = 0; i < r1.h_blocks.size(); ++i)
            CHECK(std::abs(r2.h_blocks[i] - 0.25 * r1.h_blocks[i]) < 1e-12);
    }
    SUBCASE("nakagami amplitudes carry a uniform phase") {
        ChannelConfig c;
        c.family = FadingFamily::nakagami;
        c.m = 2.0;
        c.block_length = 1;
        auto [y, r] = apply_channel(s, c, 13);
        double re = 0, im = 0, p = 0;
        for (const auto& h : r.h_blocks) {
            re += h.real();
            im += h.imag();
            p += std::norm(h);
        }
        double n = static_cast<double>(r.h_blocks.size());
        CHECK(std::abs(re / n) < 0.05);
        CHECK(std::abs(im / n) < 0.05);
        CHECK(p / n == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("config validation") {
        ChannelConfig c;
        c.noise_sigma = -1.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        ChannelConfig c2;
        c2.family = FadingFamily::nakagami;
        c2.m = 0.2;
        CHECK_THROWS_AS(c2.validate(), std::invalid_argument);
        ChannelConfig c3;
        c3.block_length = 0;
        CHECK_THROWS_AS(c3.validate(), std::invalid_argument);
    }
}

TEST_CASE("simulated BPSK error rates match closed forms") {
    const int nbits = 400'000;
    Rng rng(1234);
    BitStream tx;
    for (int i = 0; i < nbits; ++i) tx.bits.push_back(rng.next_u64() & 1);
    std::vector<double> s = bpsk_modulate(tx);

    SUBCASE("awgn: Q(sqrt(2 gamma))") {
        double gamma = 4.0;  // 6 dB
        ChannelConfig c;
        c.noise_sigma = std::sqrt(1.0 / (2.0 * gamma));
        auto [y, r] = apply_channel(s, c, 777);
        std::vector<std::complex<double>> h(s.size(), {1.0, 0.0});
        double sim = ber(tx, bpsk_demodulate(y, h));
        double theory = 0.5 * std::erfc(std::sqrt(gamma));
        CHECK(sim == doctest::Approx(theory).epsilon(0.12));
    }
    SUBCASE("rayleigh, per-symbol fading: 0.5 (1 - sqrt(g/(1+g)))") {
        double gamma = 10.0;
        ChannelConfig c;
        c.family = FadingFamily::rayleigh;
        c.noise_sigma = std::sqrt(1.0 / (2.0 * gamma));
        c.block_length = 1;
        auto [y, r] = apply_channel(s, c, 4242);
        std::vector<std::complex<double>> h(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) h[i] = r.h_at(i);
        double sim = ber(tx, bpsk_demodulate(y, h));
        double theory = 0.5 * (1.0 - std::sqrt(gamma / (1.0 + gamma)));
        CHECK(sim == doctest::Approx(theory).epsilon(0.08));
    }
}
