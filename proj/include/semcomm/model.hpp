#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semcomm/autodiff.hpp"
#include "semcomm/tensor.hpp"

namespace semcomm {

/// Common surface of the trainable image codecs. The latent is what crosses
/// the air interface: a tensor of values serialized as 32-bit singles.
class Autoencoder {
public:
    virtual ~Autoencoder() = default;

    virtual std::string kind() const = 0;
    virtual Shape image_shape() const = 0;   // [H, W, C]
    virtual Shape latent_shape() const = 0;

    virtual Expr encode_latent_ad(Tape& t, const Tensor& image) = 0;
    virtual Expr decode_image_ad(Tape& t, Expr latent) = 0;

    /// Stable ordering; checkpoint layout and Adam state follow it.
    virtual std::vector<Param*> params() = 0;

    std::size_t param_count();

    /// Latent for transmission, already rounded to single precision so the
    /// wire round trip is the identity.
    Tensor transmit_features(const Tensor& image);
    Tensor decode_latent(const Tensor& latent);
    Tensor autoencode(const Tensor& image);

    std::uint64_t latent_bits() const { return std::uint64_t(numel_of(latent_shape())) * 32; }
    /// Raw source size assuming 8-bit pixels.
    std::uint64_t source_bits() const { return std::uint64_t(numel_of(image_shape())) * 8; }
};

/// Round every value through a 32-bit single (the wire precision).
Tensor quantize_f32(const Tensor& t);

}  // namespace semcomm
