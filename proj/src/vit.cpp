#include "semcomm/vit.hpp"

#include <cmath>
#include <stdexcept>

namespace semcomm {

void ModelConfig::validate() const {
    if (image_h % patch_size != 0 || image_w % patch_size != 0)
        throw std::invalid_argument("model config: image " + std::to_string(image_h) + "x" +
                                    std::to_string(image_w) + " not divisible by patch size " +
                                    std::to_string(patch_size));
    if (embed_dim % encoder_heads != 0 || embed_dim % decoder_heads != 0)
        throw std::invalid_argument("model config: embed_dim must be divisible by head counts");
    if (latent_dim == 0 || latent_dim > embed_dim)
        throw std::invalid_argument("model config: latent_dim must be in [1, embed_dim]");
    if (encoder_layers == 0 || decoder_layers == 0)
        throw std::invalid_argument("model config: layer counts must be >= 1");
}

ModelConfig ModelConfig::vit_small() {
    ModelConfig c;
    c.image_h = c.image_w = 224;
    c.channels = 3;
    c.patch_size = 16;
    c.embed_dim = 384;
    c.encoder_layers = 12;
    c.encoder_heads = 6;
    c.decoder_layers = 8;
    c.decoder_heads = 8;
    c.latent_dim = 384 / 8;
    return c;
}

ModelConfig ModelConfig::vit_base() {
    ModelConfig c;
    c.image_h = c.image_w = 224;
    c.channels = 3;
    c.patch_size = 16;
    c.embed_dim = 768;
    c.encoder_layers = 12;
    c.encoder_heads = 12;
    c.decoder_layers = 8;
    c.decoder_heads = 16;
    c.latent_dim = 768 / 8;
    return c;
}

ModelConfig ModelConfig::vit_large() {
    ModelConfig c;
    c.image_h = c.image_w = 224;
    c.channels = 3;
    c.patch_size = 16;
    c.embed_dim = 1024;
    c.encoder_layers = 24;
    c.encoder_heads = 16;
    c.decoder_layers = 16;
    c.decoder_heads = 16;
    c.latent_dim = 1024 / 8;
    return c;
}

ModelConfig ModelConfig::toy() { return ModelConfig{}; }

Tensor patchify(const Tensor& image, std::size_t S) {
    if (image.ndim() != 3)
        throw std::invalid_argument("patchify: expected [H,W,C], got " + shape_str(image.shape));
    std::size_t H = image.shape[0], W = image.shape[1], C = image.shape[2];
    if (H % S != 0 || W % S != 0)
        throw std::invalid_argument("patchify: image " + shape_str(image.shape) +
                                    " not divisible by patch size " + std::to_string(S));
    std::size_t ph = H / S, pw = W / S;
    Tensor out({ph * pw, S * S * C});
    for (std::size_t pi = 0; pi < ph; ++pi)
        for (std::size_t pj = 0; pj < pw; ++pj) {
            double* row = out.data.data() + (pi * pw + pj) * out.cols();
            std::size_t k = 0;
            for (std::size_t i = 0; i < S; ++i)
                for (std::size_t j = 0; j < S; ++j)
                    for (std::size_t c = 0; c < C; ++c)
                        row[k++] = image.data[((pi * S + i) * W + pj * S + j) * C + c];
        }
    return out;
}

std::vector<std::size_t> unpatchify_index(std::size_t H, std::size_t W, std::size_t C,
                                          std::size_t S) {
    std::size_t pw = W / S;
    std::size_t pd = S * S * C;
    std::vector<std::size_t> map(H * W * C);
    for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < W; ++x)
            for (std::size_t c = 0; c < C; ++c) {
                std::size_t patch = (y / S) * pw + (x / S);
                std::size_t inner = ((y % S) * S + (x % S)) * C + c;
                map[(y * W + x) * C + c] = patch * pd + inner;
            }
    return map;
}

Tensor unpatchify(const Tensor& patches, std::size_t H, std::size_t W, std::size_t C,
                  std::size_t S) {
    if (patches.ndim() != 2 || patches.rows() != (H / S) * (W / S) ||
        patches.cols() != S * S * C)
        throw std::invalid_argument("unpatchify: patch tensor " + shape_str(patches.shape) +
                                    " inconsistent with target geometry");
    auto map = unpatchify_index(H, W, C, S);
    Tensor out({H, W, C});
    for (std::size_t i = 0; i < map.size(); ++i) out.data[i] = patches.data[map[i]];
    return out;
}

Expr multi_head_attention(Tape& t, Expr x, Param& qkv_w, Param& qkv_b, Param& proj_w,
                          Param& proj_b, std::size_t heads, std::vector<Tensor>* attn_out) {
    std::size_t D = x.val().cols();
    std::size_t Dh = D / heads;
    Expr qkv = ad::add_rowvec(ad::matmul(x, ad::param(t, qkv_w)), ad::param(t, qkv_b));
    std::vector<Expr> head_outs;
    head_outs.reserve(heads);
    for (std::size_t h = 0; h < heads; ++h) {
        Expr q = ad::slice_cols(qkv, h * Dh, Dh);
        Expr k = ad::slice_cols(qkv, D + h * Dh, Dh);
        Expr v = ad::slice_cols(qkv, 2 * D + h * Dh, Dh);
        Expr scores = ad::scale(ad::matmul_nt(q, k), 1.0 / std::sqrt(double(Dh)));
        Expr a = ad::softmax_rows(scores);
        if (attn_out) attn_out->push_back(a.val());
        head_outs.push_back(ad::matmul(a, v));
    }
    Expr cat = heads == 1 ? head_outs[0] : ad::concat_cols(head_outs);
    return ad::add_rowvec(ad::matmul(cat, ad::param(t, proj_w)), ad::param(t, proj_b));
}

Expr transformer_block(Tape& t, Expr x, TransformerBlockParams& p, std::size_t heads,
                       std::vector<Tensor>* attn_out) {
    Expr n1 = ad::layer_norm(x, ad::param(t, p.ln1_gain), ad::param(t, p.ln1_bias));
    Expr att = multi_head_attention(t, n1, p.qkv_w, p.qkv_b, p.proj_w, p.proj_b, heads, attn_out);
    Expr x1 = ad::add(x, att);
    Expr n2 = ad::layer_norm(x1, ad::param(t, p.ln2_gain), ad::param(t, p.ln2_bias));
    Expr h = ad::gelu(ad::add_rowvec(ad::matmul(n2, ad::param(t, p.ff1_w)), ad::param(t, p.ff1_b)));
    Expr ff = ad::add_rowvec(ad::matmul(h, ad::param(t, p.ff2_w)), ad::param(t, p.ff2_b));
    return ad::add(x1, ff);
}

namespace {

Tensor randn(Shape s, double stddev, Rng& rng) {
    Tensor t(std::move(s));
    for (auto& v : t.data) v = stddev * rng.gaussian();
    return t;
}

}  // namespace

TransformerBlockParams make_block(const std::string& prefix, std::size_t D, Rng& rng) {
    TransformerBlockParams b;
    b.ln1_gain = Param(prefix + ".ln1.gain", Tensor::full({D}, 1.0));
    b.ln1_bias = Param(prefix + ".ln1.bias", Tensor::zeros({D}));
    b.qkv_w = Param(prefix + ".qkv.w", randn({D, 3 * D}, 0.02, rng));
    b.qkv_b = Param(prefix + ".qkv.b", Tensor::zeros({3 * D}));
    b.proj_w = Param(prefix + ".proj.w", randn({D, D}, 0.02, rng));
    b.proj_b = Param(prefix + ".proj.b", Tensor::zeros({D}));
    b.ln2_gain = Param(prefix + ".ln2.gain", Tensor::full({D}, 1.0));
    b.ln2_bias = Param(prefix + ".ln2.bias", Tensor::zeros({D}));
    b.ff1_w = Param(prefix + ".ff1.w", randn({D, 4 * D}, 0.02, rng));
    b.ff1_b = Param(prefix + ".ff1.b", Tensor::zeros({4 * D}));
    b.ff2_w = Param(prefix + ".ff2.w", randn({4 * D, D}, 0.02, rng));
    b.ff2_b = Param(prefix + ".ff2.b", Tensor::zeros({D}));
    return b;
}

void collect_block(TransformerBlockParams& b, std::vector<Param*>& out) {
    out.push_back(&b.ln1_gain);
    out.push_back(&b.ln1_bias);
    out.push_back(&b.qkv_w);
    out.push_back(&b.qkv_b);
    out.push_back(&b.proj_w);
    out.push_back(&b.proj_b);
    out.push_back(&b.ln2_gain);
    out.push_back(&b.ln2_bias);
    out.push_back(&b.ff1_w);
    out.push_back(&b.ff1_b);
    out.push_back(&b.ff2_w);
    out.push_back(&b.ff2_b);
}

ViTAutoencoder::ViTAutoencoder(ModelConfig cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(seed, 7);
    std::size_t D = cfg_.embed_dim;
    std::size_t N = cfg_.num_patches();
    std::size_t pd = cfg_.patch_dim();
    embed_w_ = Param("enc.embed.w", randn({pd, D}, 0.02, rng));
    cls_token_ = Param("enc.cls", randn({1, D}, 0.02, rng));
    enc_pos_ = Param("enc.pos", randn({N + 1, D}, 0.02, rng));
    for (std::size_t i = 0; i < cfg_.encoder_layers; ++i)
        enc_blocks_.push_back(make_block("enc.block" + std::to_string(i), D, rng));
    enc_final_gain_ = Param("enc.final_ln.gain", Tensor::full({D}, 1.0));
    enc_final_bias_ = Param("enc.final_ln.bias", Tensor::zeros({D}));
    down_w_ = Param("bottleneck.down.w", randn({D, cfg_.latent_dim}, 0.02, rng));
    down_b_ = Param("bottleneck.down.b", Tensor::zeros({cfg_.latent_dim}));
    up_w_ = Param("bottleneck.up.w", randn({cfg_.latent_dim, D}, 0.02, rng));
    up_b_ = Param("bottleneck.up.b", Tensor::zeros({D}));
    dec_cls_ = Param("dec.cls", randn({1, D}, 0.02, rng));
    dec_pos_ = Param("dec.pos", randn({N + 1, D}, 0.02, rng));
    for (std::size_t i = 0; i < cfg_.decoder_layers; ++i)
        dec_blocks_.push_back(make_block("dec.block" + std::to_string(i), D, rng));
    head_w_ = Param("dec.head.w", randn({D, pd}, 0.02, rng));
    head_b_ = Param("dec.head.b", Tensor::zeros({pd}));
}

std::vector<Param*> ViTAutoencoder::params() {
    std::vector<Param*> out{&embed_w_, &cls_token_, &enc_pos_};
    for (auto& b : enc_blocks_) collect_block(b, out);
    out.push_back(&enc_final_gain_);
    out.push_back(&enc_final_bias_);
    out.push_back(&down_w_);
    out.push_back(&down_b_);
    out.push_back(&up_w_);
    out.push_back(&up_b_);
    out.push_back(&dec_cls_);
    out.push_back(&dec_pos_);
    for (auto& b : dec_blocks_) collect_block(b, out);
    out.push_back(&head_w_);
    out.push_back(&head_b_);
    return out;
}

Expr ViTAutoencoder::encode_full_ad(Tape& t, const Tensor& image) {
    if (image.shape != image_shape())
        throw std::invalid_argument("encode: image shape " + shape_str(image.shape) +
                                    " does not match config " + shape_str(image_shape()));
    last_attention_.clear();
    auto* probe = record_attention_ ? &last_attention_ : nullptr;
    Expr patches = ad::constant(t, patchify(image, cfg_.patch_size));
    Expr projected = ad::matmul(patches, ad::param(t, embed_w_));
    Expr z = ad::concat_rows({ad::param(t, cls_token_), projected});
    z = ad::add(z, ad::param(t, enc_pos_));
    for (auto& b : enc_blocks_) z = transformer_block(t, z, b, cfg_.encoder_heads, probe);
    return ad::layer_norm(z, ad::param(t, enc_final_gain_), ad::param(t, enc_final_bias_));
}

Expr ViTAutoencoder::bottleneck_ad(Tape& t, Expr features) {
    Expr tokens = ad::slice_rows(features, 1, cfg_.num_patches());
    return ad::add_rowvec(ad::matmul(tokens, ad::param(t, down_w_)), ad::param(t, down_b_));
}

Expr ViTAutoencoder::encode_latent_ad(Tape& t, const Tensor& image) {
    return bottleneck_ad(t, encode_full_ad(t, image));
}

Expr ViTAutoencoder::decode_image_ad(Tape& t, Expr latent) {
    if (latent.val().shape != latent_shape())
        throw std::invalid_argument("decode: latent shape " + shape_str(latent.val().shape) +
                                    " does not match config " + shape_str(latent_shape()));
    auto* probe = record_attention_ ? &last_attention_ : nullptr;
    Expr up = ad::add_rowvec(ad::matmul(latent, ad::param(t, up_w_)), ad::param(t, up_b_));
    Expr z = ad::concat_rows({ad::param(t, dec_cls_), up});
    z = ad::add(z, ad::param(t, dec_pos_));
    for (auto& b : dec_blocks_) z = transformer_block(t, z, b, cfg_.decoder_heads, probe);
    Expr tokens = ad::slice_rows(z, 1, cfg_.num_patches());
    Expr patches =
        ad::add_rowvec(ad::matmul(tokens, ad::param(t, head_w_)), ad::param(t, head_b_));
    Expr pixels = ad::sigmoid(patches);
    auto map = unpatchify_index(cfg_.image_h, cfg_.image_w, cfg_.channels, cfg_.patch_size);
    return ad::permute(pixels, map, image_shape());
}

Tensor ViTAutoencoder::encode_features(const Tensor& image) {
    Tape t;
    return encode_full_ad(t, image).val();
}

}  // namespace semcomm
