#include "semcomm/cnn.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace semcomm {

ConvConfig::ShapeChain ConvConfig::shapes() const {
    if (encoder.empty()) throw std::invalid_argument("conv config: no encoder layers");
    if (bottleneck == 0) throw std::invalid_argument("conv config: bottleneck must be >= 1");
    ShapeChain s;
    s.h = {image_h};
    s.w = {image_w};
    s.c = {channels};
    for (const auto& l : encoder) {
        std::size_t hin = s.h.back(), win = s.w.back();
        if (l.stride == 0 || l.kernel == 0)
            throw std::invalid_argument("conv config: zero kernel or stride");
        if (hin < l.kernel || win < l.kernel)
            throw std::invalid_argument("conv config: kernel " + std::to_string(l.kernel) +
                                        " exceeds input " + std::to_string(hin) + "x" +
                                        std::to_string(win));
        s.h.push_back((hin - l.kernel) / l.stride + 1);
        s.w.push_back((win - l.kernel) / l.stride + 1);
        s.c.push_back(l.out_channels);
    }
    return s;
}

ConvConfig ConvConfig::standard(std::size_t h, std::size_t w, std::size_t c,
                                std::size_t bottleneck) {
    ConvConfig cfg;
    cfg.image_h = h;
    cfg.image_w = w;
    cfg.channels = c;
    cfg.bottleneck = bottleneck;
    return cfg;
}

ConvConfig ConvConfig::tiny() {
    ConvConfig cfg;
    cfg.image_h = cfg.image_w = 8;
    cfg.channels = 1;
    cfg.encoder = {{3, 2, 4}};
    cfg.bottleneck = 8;
    return cfg;
}

namespace {

Tensor randn(Shape s, double stddev, Rng& rng) {
    Tensor t(std::move(s));
    for (auto& v : t.data) v = stddev * rng.gaussian();
    return t;
}

}  // namespace

CnnAutoencoder::CnnAutoencoder(ConvConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
    chain_ = cfg_.shapes();
    Rng rng(seed, 11);
    std::size_t L = cfg_.encoder.size();
    for (std::size_t i = 0; i < L; ++i) {
        const auto& l = cfg_.encoder[i];
        std::string p = "enc.conv" + std::to_string(i);
        enc_.push_back({Param(p + ".w", randn({l.kernel, l.kernel, chain_.c[i], l.out_channels},
                                              0.05, rng)),
                        Param(p + ".b", Tensor::zeros({l.out_channels}))});
    }
    std::size_t flat = chain_.h[L] * chain_.w[L] * chain_.c[L];
    enc_dense_w_ = Param("enc.dense.w", randn({flat, cfg_.bottleneck}, 0.02, rng));
    enc_dense_b_ = Param("enc.dense.b", Tensor::zeros({cfg_.bottleneck}));
    dec_dense_w_ = Param("dec.dense.w", randn({cfg_.bottleneck, flat}, 0.02, rng));
    dec_dense_b_ = Param("dec.dense.b", Tensor::zeros({flat}));
    for (std::size_t i = L; i-- > 0;) {
        const auto& l = cfg_.encoder[i];
        std::string p = "dec.tconv" + std::to_string(L - 1 - i);
        dec_.push_back({Param(p + ".w", randn({l.kernel, l.kernel, l.out_channels, chain_.c[i]},
                                              0.05, rng)),
                        Param(p + ".b", Tensor::zeros({chain_.c[i]}))});
    }
}

std::vector<Param*> CnnAutoencoder::params() {
    std::vector<Param*> out;
    for (auto& c : enc_) {
        out.push_back(&c.w);
        out.push_back(&c.b);
    }
    out.push_back(&enc_dense_w_);
    out.push_back(&enc_dense_b_);
    out.push_back(&dec_dense_w_);
    out.push_back(&dec_dense_b_);
    for (auto& c : dec_) {
        out.push_back(&c.w);
        out.push_back(&c.b);
    }
    return out;
}

Expr CnnAutoencoder::encode_latent_ad(Tape& t, const Tensor& image) {
    if (image.shape != image_shape())
        throw std::invalid_argument("cnn encode: image shape " + shape_str(image.shape) +
                                    " does not match config " + shape_str(image_shape()));
    Expr x = ad::constant(t, image);
    for (std::size_t i = 0; i < enc_.size(); ++i) {
        x = ad::conv2d(x, ad::param(t, enc_[i].w), ad::param(t, enc_[i].b),
                       cfg_.encoder[i].stride);
        x = ad::relu(x);
    }
    std::size_t flat = x.val().numel();
    x = ad::reshape(x, {1, flat});
    Expr z = ad::add_rowvec(ad::matmul(x, ad::param(t, enc_dense_w_)), ad::param(t, enc_dense_b_));
    return ad::reshape(z, {cfg_.bottleneck});
}

Expr CnnAutoencoder::decode_image_ad(Tape& t, Expr latent) {
    if (latent.val().shape != latent_shape())
        throw std::invalid_argument("cnn decode: latent shape " + shape_str(latent.val().shape) +
                                    " does not match config " + shape_str(latent_shape()));
    std::size_t L = cfg_.encoder.size();
    Expr x = ad::reshape(latent, {1, cfg_.bottleneck});
    x = ad::add_rowvec(ad::matmul(x, ad::param(t, dec_dense_w_)), ad::param(t, dec_dense_b_));
    x = ad::relu(x);
    x = ad::reshape(x, {chain_.h[L], chain_.w[L], chain_.c[L]});
    for (std::size_t j = 0; j < dec_.size(); ++j) {
        std::size_t i = L - 1 - j;  // encoder layer this mirrors
        const auto& l = cfg_.encoder[i];
        std::size_t hin = x.val().shape[0], win = x.val().shape[1];
        std::size_t out_pad_h = chain_.h[i] - ((hin - 1) * l.stride + l.kernel);
        std::size_t out_pad_w = chain_.w[i] - ((win - 1) * l.stride + l.kernel);
        x = ad::conv2d_transpose(x, ad::param(t, dec_[j].w), ad::param(t, dec_[j].b), l.stride,
                                 out_pad_h, out_pad_w);
        if (j + 1 < dec_.size()) x = ad::relu(x);
    }
    return ad::sigmoid(x);
}

Tensor Pca::apply(const Tensor& x) const {
    Tensor centered = x;
    std::size_t n = x.rows(), f = x.cols();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j) centered.data[i * f + j] -= mean.data[j];
    return matmul(centered, w);
}

Tensor Pca::reconstruct(const Tensor& z) const {
    Tensor out = matmul_nt(z, w);  // z * w^T
    std::size_t n = out.rows(), f = out.cols();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j) out.data[i * f + j] += mean.data[j];
    return out;
}

Pca pca_fit(const Tensor& x, std::size_t d) {
    std::size_t n = x.rows(), f = x.cols();
    if (d == 0 || d > std::min(n, f))
        throw std::invalid_argument("pca_fit: d must be in [1, min(samples, features)]");
    Pca p;
    p.mean = Tensor::zeros({f});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j) p.mean.data[j] += x.data[i * f + j];
    for (auto& v : p.mean.data) v /= double(n);

    Eigen::MatrixXd c(f, f);
    {
        Eigen::MatrixXd centered(n, f);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < f; ++j)
                centered(long(i), long(j)) = x.data[i * f + j] - p.mean.data[j];
        c = centered.transpose() * centered / double(n);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    if (es.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigensolver failed");
    // eigenvalues ascending; take the top d columns
    p.w = Tensor({f, d});
    for (std::size_t j = 0; j < d; ++j) {
        auto col = es.eigenvectors().col(long(f - 1 - j));
        for (std::size_t i = 0; i < f; ++i) p.w.data[i * d + j] = col(long(i));
    }
    return p;
}

}  // namespace semcomm
