#pragma once

#include "semcomm/model.hpp"
#include "semcomm/rng.hpp"

namespace semcomm {

struct ConvLayerSpec {
    std::size_t kernel = 3;
    std::size_t stride = 2;
    std::size_t out_channels = 16;
};

/// Convolutional autoencoder geometry. The decoder mirrors the encoder with
/// transpose convolutions; output padding is derived so decoder output shape
/// equals encoder input shape.
struct ConvConfig {
    std::size_t image_h = 32;
    std::size_t image_w = 32;
    std::size_t channels = 3;
    std::vector<ConvLayerSpec> encoder = {{3, 2, 16}, {3, 2, 32}, {3, 2, 64}};
    std::size_t bottleneck = 512;  // dense latent width

    /// Per-layer output heights/widths; throws on conv arithmetic violations.
    struct ShapeChain {
        std::vector<std::size_t> h, w, c;  // index 0 = input
    };
    ShapeChain shapes() const;
    void validate() const { (void)shapes(); }

    static ConvConfig standard(std::size_t h, std::size_t w, std::size_t c,
                               std::size_t bottleneck);
    static ConvConfig tiny();  // 8x8 single-layer config for gradient checks
};

class CnnAutoencoder : public Autoencoder {
public:
    CnnAutoencoder(ConvConfig cfg, std::uint64_t seed);

    std::string kind() const override { return "cnn"; }
    Shape image_shape() const override { return {cfg_.image_h, cfg_.image_w, cfg_.channels}; }
    Shape latent_shape() const override { return {cfg_.bottleneck}; }
    const ConvConfig& config() const { return cfg_; }

    Expr encode_latent_ad(Tape& t, const Tensor& image) override;
    Expr decode_image_ad(Tape& t, Expr latent) override;
    std::vector<Param*> params() override;

private:
    ConvConfig cfg_;
    ConvConfig::ShapeChain chain_;
    struct ConvParams {
        Param w, b;
    };
    std::vector<ConvParams> enc_;
    Param enc_dense_w_, enc_dense_b_;
    Param dec_dense_w_, dec_dense_b_;
    std::vector<ConvParams> dec_;  // transpose convs, deepest first
};

/// Principal components of row-sample matrix X [n, features]; X is centered
/// internally. Columns of w are the top-d directions; reconstruction is
/// (X W) W^T + mean (the rank-d linear map with minimal squared error).
struct Pca {
    Tensor mean;  // [features]
    Tensor w;     // [features, d]

    Tensor apply(const Tensor& x) const;        // [n, d]
    Tensor reconstruct(const Tensor& z) const;  // [n, features]
};

Pca pca_fit(const Tensor& x, std::size_t d);

}  // namespace semcomm
