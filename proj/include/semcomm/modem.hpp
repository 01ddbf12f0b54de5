#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "semcomm/tensor.hpp"

namespace semcomm {

/// Ordered 0/1 sequence. When produced from features the length is a
/// multiple of 32 (one single-precision word per value).
struct BitStream {
    std::vector<std::uint8_t> bits;

    std::size_t size() const { return bits.size(); }
    bool operator==(const BitStream&) const = default;
};

/// Round each value to the nearest 32-bit single (round-half-even) and emit
/// sign bit, then 8 exponent bits, then 23 mantissa bits, in row-major
/// tensor order. Non-finite input is a transmitter error.
BitStream features_to_bits(const Tensor& f);

/// Exact inverse on uncorrupted streams. Corrupted words decoding to
/// NaN/Inf are sanitized to 0.0 so a flipped exponent bit stays a local
/// erasure instead of poisoning the reconstruction.
Tensor bits_to_features(const BitStream& bits, const Shape& shape);

double sanitize_feature(double v);

/// s_i = 2 b_i - 1
std::vector<double> bpsk_modulate(const BitStream& bits);

/// Coherent hard decision with known channel coefficients:
/// z_i = Re(y_i / h_i), bit = 1 iff z_i >= 0.
BitStream bpsk_demodulate(const std::vector<std::complex<double>>& y,
                          const std::vector<std::complex<double>>& h);

/// Packed dump: 8-byte little-endian bit count, then bytes MSB-first,
/// trailing pad bits zero.
std::vector<std::uint8_t> bitstream_pack(const BitStream& bits);
BitStream bitstream_unpack(const std::vector<std::uint8_t>& bytes);
void bitstream_save(const BitStream& bits, const std::string& path);
BitStream bitstream_load(const std::string& path);

}  // namespace semcomm
