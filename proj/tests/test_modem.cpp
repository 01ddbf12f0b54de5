#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>

#include "semcomm/modem.hpp"
#include "semcomm/rng.hpp"

using namespace semcomm;

namespace {

std::string bits_str(const BitStream& b, std::size_t word) {
    std::string s;
    for (std::size_t i = 0; i < 32; ++i) s += char('0' + b.bits[32 * word + i]);
    return s;
}

std::uint32_t word_of(const BitStream& b, std::size_t word) {
    std::uint32_t u = 0;
    for (std::size_t i = 0; i < 32; ++i) u = (u << 1) | b.bits[32 * word + i];
    return u;
}

}  // namespace

TEST_CASE("IEEE-754 single encodings of reference values") {
    Tensor f({3}, {1.0, 0.0, -0.15625});
    BitStream b = features_to_bits(f);
    REQUIRE(b.size() == 96);
    CHECK(bits_str(b, 0) == "00111111100000000000000000000000");  // 0x3f800000
    CHECK(bits_str(b, 1) == "00000000000000000000000000000000");
    CHECK(bits_str(b, 2) == "10111110001000000000000000000000");  // 0xbe200000
}

TEST_CASE("encoding matches std::bit_cast on random singles") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        double v = rng.uniform(-10.0, 10.0);
        BitStream b = features_to_bits(Tensor({1}, {v}));
        CHECK(word_of(b, 0) == std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
}

TEST_CASE("features_to_bits rejects non-finite input") {
    CHECK_THROWS_AS(features_to_bits(Tensor({1}, {std::nan("")})), std::invalid_argument);
    CHECK_THROWS_AS(
        features_to_bits(Tensor({1}, {std::numeric_limits<double>::infinity()})),
        std::invalid_argument);
}

TEST_CASE("round trip is exact at single precision") {
    Rng rng(2);
    Tensor f({4, 8});
    for (auto& v : f.data) v = static_cast<double>(static_cast<float>(rng.gaussian()));
    Tensor back = bits_to_features(features_to_bits(f), f.shape);
    CHECK(back.shape == f.shape);
    CHECK(back.data == f.data);
}

TEST_CASE("corrupted words decoding to NaN or Inf become 0.0") {
    // all-ones exponent: flip bit 1 of 1.0f -> 0x7f800000 (Inf)
    BitStream b = features_to_bits(Tensor({1}, {1.0}));
    b.bits[1] = 1;
    CHECK(word_of(b, 0) == 0x7f800000u);
    Tensor out = bits_to_features(b, {1});
    CHECK(out.data[0] == 0.0);
    b.bits[31] = 1;  // NaN payload
    CHECK(bits_to_features(b, {1}).data[0] == 0.0);
}

TEST_CASE("single exponent bit flip moves 1.0 by a power of two") {
    BitStream b = features_to_bits(Tensor({1}, {1.0}));
    b.bits[8] = 0;  // lowest exponent bit: 0x3f800000 -> 0x3f000000
    CHECK(bits_to_features(b, {1}).data[0] == 0.5);
    b.bits[8] = 1;
    b.bits[31] = 1;  // lowest mantissa bit: one ULP above 1.0f
    CHECK(bits_to_features(b, {1}).data[0] ==
          doctest::Approx(1.0 + std::pow(2.0, -23)).epsilon(1e-12));
}

TEST_CASE("bpsk maps 0 -> -1 and 1 -> +1") {
    BitStream b{{0, 1, 1, 0}};
    CHECK(bpsk_modulate(b) == std::vector<double>{-1.0, 1.0, 1.0, -1.0});
}

TEST_CASE("demodulation inverts modulation through a clean unit channel") {
    Rng rng(3);
    BitStream b;
    for (int i = 0; i < 2048; ++i) b.bits.push_back(rng.next_u64() & 1);
    std::vector<double> s = bpsk_modulate(b);
    std::vector<std::complex<double>> y(s.size()), h(s.size(), {1.0, 0.0});
    for (std::size_t i = 0; i < s.size(); ++i) y[i] = s[i];
    CHECK(bpsk_demodulate(y, h) == b);
}

TEST_CASE("demodulation equalizes a rotated, scaled channel") {
    BitStream b{{1, 0, 1, 1}};
    std::vector<std::complex<double>> h = {
        {0.3, 0.4}, {-1.2, 0.1}, {0.0, 2.0}, {0.5, -0.5}};
    std::vector<double> s = bpsk_modulate(b);
    std::vector<std::complex<double>> y(4);
    for (int i = 0; i < 4; ++i) y[i] = h[i] * s[i];
    CHECK(bpsk_demodulate(y, h) == b);
    CHECK_THROWS_AS(bpsk_demodulate(y, {{0, 0}, {1, 0}, {1, 0}, {1, 0}}),
                    std::invalid_argument);
}

TEST_CASE("packed format: little-endian length then MSB-first bytes") {
    BitStream b{{1, 0, 1, 1, 0, 0, 0, 1, 1, 1}};
    std::vector<std::uint8_t> packed = bitstream_pack(b);
    REQUIRE(packed.size() == 10);
    CHECK(packed[0] == 10);
    for (int i = 1; i < 8; ++i) CHECK(packed[i] == 0);
    CHECK(packed[8] == 0b10110001);
    CHECK(packed[9] == 0b11000000);  // trailing pad bits zero
    CHECK(bitstream_unpack(packed) == b);
}

TEST_CASE("save/load round trip") {
    Rng rng(4);
    BitStream b;
    for (int i = 0; i < 555; ++i) b.bits.push_back(rng.next_u64() & 1);
    std::string path = "/tmp/semcomm_bits_test.bin";
    bitstream_save(b, path);
    CHECK(bitstream_load(path) == b);
    std::remove(path.c_str());
}
