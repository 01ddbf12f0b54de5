#pragma once

#include "semcomm/model.hpp"
#include "semcomm/rng.hpp"

namespace semcomm {

/// DAE-ViT geometry and depth. Presets mirror the small/base/large rows of
/// the reference configuration on 224x224x3 inputs.
struct ModelConfig {
    std::size_t image_h = 32;
    std::size_t image_w = 32;
    std::size_t channels = 3;
    std::size_t patch_size = 4;
    std::size_t embed_dim = 64;
    std::size_t encoder_layers = 2;
    std::size_t encoder_heads = 4;
    std::size_t decoder_layers = 2;
    std::size_t decoder_heads = 4;
    std::size_t latent_dim = 8;  // per-token bottleneck width (embed_dim/8 by default)

    void validate() const;
    std::size_t num_patches() const { return (image_h / patch_size) * (image_w / patch_size); }
    std::size_t patch_dim() const { return patch_size * patch_size * channels; }

    static ModelConfig vit_small();
    static ModelConfig vit_base();
    static ModelConfig vit_large();
    /// Desk-scale default: 32x32 images, patch 4, D=64, 2+2 layers, latent 8.
    static ModelConfig toy();
};

/// Row j of the result is patch j in raster order, pixels flattened
/// row-major; exact inverse of unpatchify.
Tensor patchify(const Tensor& image, std::size_t patch_size);
Tensor unpatchify(const Tensor& patches, std::size_t H, std::size_t W, std::size_t C,
                  std::size_t patch_size);

/// Index map such that image.data[i] = patches.data[map[i]].
std::vector<std::size_t> unpatchify_index(std::size_t H, std::size_t W, std::size_t C,
                                          std::size_t patch_size);

struct TransformerBlockParams {
    Param ln1_gain, ln1_bias;
    Param qkv_w, qkv_b;    // fused [D, 3D] projection, head-major columns
    Param proj_w, proj_b;  // [D, D]
    Param ln2_gain, ln2_bias;
    Param ff1_w, ff1_b;    // [D, 4D]
    Param ff2_w, ff2_b;    // [4D, D]
};

/// Fresh block with the standard init (LN gains 1, projections N(0, 0.02)).
TransformerBlockParams make_block(const std::string& prefix, std::size_t D, Rng& rng);
void collect_block(TransformerBlockParams& b, std::vector<Param*>& out);

/// Pre-norm residual block: x + MHSA(LN(x)), then x + FF(LN(x)).
/// If attn_out is non-null the per-head attention matrices are appended.
Expr transformer_block(Tape& t, Expr x, TransformerBlockParams& p, std::size_t heads,
                       std::vector<Tensor>* attn_out = nullptr);

/// MHSA alone (Eqs. qk^T/sqrt(Dh) softmax, heads concatenated and
/// reprojected); exposed for direct testing.
Expr multi_head_attention(Tape& t, Expr x, Param& qkv_w, Param& qkv_b, Param& proj_w,
                          Param& proj_b, std::size_t heads,
                          std::vector<Tensor>* attn_out = nullptr);

class ViTAutoencoder : public Autoencoder {
public:
    ViTAutoencoder(ModelConfig cfg, std::uint64_t seed);

    std::string kind() const override { return "vit"; }
    Shape image_shape() const override { return {cfg_.image_h, cfg_.image_w, cfg_.channels}; }
    Shape latent_shape() const override { return {cfg_.num_patches(), cfg_.latent_dim}; }
    const ModelConfig& config() const { return cfg_; }

    /// Full encoder: patchify -> embed -> blocks -> final layer norm.
    Expr encode_full_ad(Tape& t, const Tensor& image);
    /// Bottleneck down-projection of the patch tokens (class token stays
    /// at the transmitter; the receiver has its own learned token).
    Expr bottleneck_ad(Tape& t, Expr features);

    Expr encode_latent_ad(Tape& t, const Tensor& image) override;
    Expr decode_image_ad(Tape& t, Expr latent) override;

    std::vector<Param*> params() override;

    /// Inference helper: F in R^{(N+1) x D}.
    Tensor encode_features(const Tensor& image);

    /// Attention matrices recorded by the most recent forward pass
    /// (encoder layers first, one tensor per head per layer).
    const std::vector<Tensor>& last_attention() const { return last_attention_; }
    void record_attention(bool on) { record_attention_ = on; }

private:
    ModelConfig cfg_;
    Param embed_w_;        // [patch_dim, D]
    Param cls_token_;      // [1, D]
    Param enc_pos_;        // [N+1, D]
    std::vector<TransformerBlockParams> enc_blocks_;
    Param enc_final_gain_, enc_final_bias_;
    Param down_w_, down_b_;  // [D, latent], [latent]
    Param up_w_, up_b_;      // [latent, D], [D]
    Param dec_cls_;          // [1, D]
    Param dec_pos_;          // [N+1, D]
    std::vector<TransformerBlockParams> dec_blocks_;
    Param head_w_, head_b_;  // [D, patch_dim]

    bool record_attention_ = false;
    std::vector<Tensor> last_attention_;
};

}  // namespace semcomm
