#include "semcomm/modem.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace semcomm {

BitStream features_to_bits(const Tensor& f) {
    BitStream out;
    out.bits.reserve(f.numel() * 32);
    for (double v : f.data) {
        if (!std::isfinite(v))
            throw std::invalid_argument("features_to_bits: non-finite feature value");
        // double -> float is round-to-nearest-even per IEEE 754
        auto word = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int b = 31; b >= 0; --b) out.bits.push_back(std::uint8_t((word >> b) & 1u));
    }
    return out;
}

double sanitize_feature(double v) { return std::isfinite(v) ? v : 0.0; }

Tensor bits_to_features(const BitStream& bits, const Shape& shape) {
    std::size_t n = numel_of(shape);
    if (bits.size() != n * 32)
        throw std::invalid_argument("bits_to_features: got " + std::to_string(bits.size()) +
                                    " bits, need " + std::to_string(n * 32) + " for shape " +
                                    shape_str(shape));
    Tensor out(shape);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t word = 0;
        for (std::size_t b = 0; b < 32; ++b) word = (word << 1) | bits.bits[i * 32 + b];
        out.data[i] = sanitize_feature(double(std::bit_cast<float>(word)));
    }
    return out;
}

std::vector<double> bpsk_modulate(const BitStream& bits) {
    std::vector<double> s;
    s.reserve(bits.size());
    for (auto b : bits.bits) {
        if (b > 1) throw std::invalid_argument("bpsk_modulate: bit value out of {0,1}");
        s.push_back(2.0 * double(b) - 1.0);
    }
    return s;
}

BitStream bpsk_demodulate(const std::vector<std::complex<double>>& y,
                          const std::vector<std::complex<double>>& h) {
    if (y.size() != h.size())
        throw std::invalid_argument("bpsk_demodulate: signal/channel length mismatch");
    BitStream out;
    out.bits.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::abs(h[i]) == 0.0)
            throw std::invalid_argument("bpsk_demodulate: zero channel coefficient at symbol " +
                                        std::to_string(i));
        double z = std::real(y[i] / h[i]);
        out.bits.push_back(z >= 0.0 ? 1 : 0);
    }
    return out;
}

std::vector<std::uint8_t> bitstream_pack(const BitStream& bits) {
    std::vector<std::uint8_t> out(8, 0);
    std::uint64_t n = bits.size();
    for (int i = 0; i < 8; ++i) out[i] = std::uint8_t((n >> (8 * i)) & 0xff);
    out.resize(8 + (n + 7) / 8, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (bits.bits[i]) out[8 + i / 8] |= std::uint8_t(0x80u >> (i % 8));
    return out;
}

BitStream bitstream_unpack(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8) throw std::invalid_argument("bitstream_unpack: missing length header");
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= std::uint64_t(bytes[i]) << (8 * i);
    if (bytes.size() != 8 + (n + 7) / 8)
        throw std::invalid_argument("bitstream_unpack: byte count does not match header length");
    BitStream out;
    out.bits.resize(n);
    for (std::uint64_t i = 0; i < n; ++i)
        out.bits[i] = (bytes[8 + i / 8] >> (7 - i % 8)) & 1u;
    return out;
}

void bitstream_save(const BitStream& bits, const std::string& path) {
    auto bytes = bitstream_pack(bits);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("bitstream_save: cannot open " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

BitStream bitstream_load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("bitstream_load: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return bitstream_unpack(bytes);
}

}  // namespace semcomm
