#include "semcomm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "semcomm/modem.hpp"

namespace semcomm {

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0) throw std::invalid_argument("train: counts must be > 0");
    if (learning_rate < 0.0) throw std::invalid_argument("train: learning rate must be >= 0");
    if (noise_factor < 0.0) throw std::invalid_argument("train: noise factor must be >= 0");
}

void adam_step(const std::vector<Param*>& params, double lr, double beta1, double beta2,
               double eps, std::size_t step, double grad_scale) {
    double bc1 = 1.0 - std::pow(beta1, double(step));
    double bc2 = 1.0 - std::pow(beta2, double(step));
    for (Param* p : params) {
        for (std::size_t i = 0; i < p->value.numel(); ++i) {
            double g = p->grad.data[i] * grad_scale;
            p->adam_m.data[i] = beta1 * p->adam_m.data[i] + (1.0 - beta1) * g;
            p->adam_v.data[i] = beta2 * p->adam_v.data[i] + (1.0 - beta2) * g * g;
            double mhat = p->adam_m.data[i] / bc1;
            double vhat = p->adam_v.data[i] / bc2;
            p->value.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

namespace {

/// |h| from the configured surrogate family; 1 for none/awgn.
double surrogate_gain(const TrainConfig& cfg, Rng& rng) {
    switch (cfg.train_family) {
        case FadingFamily::none:
        case FadingFamily::awgn_only: return 1.0;
        case FadingFamily::rayleigh: return std::abs(sample_rayleigh(rng));
        case FadingFamily::rician: return std::abs(sample_rician(cfg.k_factor, rng));
        case FadingFamily::nakagami:
            return sample_nakagami(cfg.m, cfg.omega, rng) / std::sqrt(cfg.omega);
    }
    return 1.0;
}

}  // namespace

TrainResult train(Autoencoder& model, const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.count() == 0) throw std::invalid_argument("train: empty dataset");
    if (data.images[0].shape != model.image_shape())
        throw std::invalid_argument("train: dataset image shape " +
                                    shape_str(data.images[0].shape) + " does not match model " +
                                    shape_str(model.image_shape()));
    auto params = model.params();
    Rng shuffle_rng(cfg.seed, 0x5aff1eULL);
    TrainResult result;
    std::size_t step = 0;

    std::vector<std::size_t> order(data.count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates driven by the run seed
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.next_u64() % i]);

        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
            std::size_t bsz = std::min(cfg.batch_size, order.size() - b0);
            for (Param* p : params) p->zero_grad();
            double batch_loss = 0.0;
            for (std::size_t k = 0; k < bsz; ++k) {
                const Tensor& img = data.images[order[b0 + k]];
                Rng img_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL,
                            (std::uint64_t(epoch) << 32) | (b0 + k));
                double a = surrogate_gain(cfg, img_rng);
                Tape t;
                Expr latent = model.encode_latent_ad(t, img);
                Expr corrupted = ad::scale(latent, a);
                if (cfg.noise_factor > 0.0) {
                    Tensor noise(latent.val().shape);
                    for (auto& v : noise.data) v = cfg.noise_factor * img_rng.gaussian();
                    corrupted = ad::add_const(corrupted, noise);
                }
                Expr xhat = model.decode_image_ad(t, corrupted);
                Expr loss = ad::mse_loss(xhat, img);
                double lv = loss.val().data[0];
                if (!std::isfinite(lv))
                    throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                             std::to_string(epoch) + ", step " +
                                             std::to_string(step));
                batch_loss += lv;
                t.backward(loss.id);
            }
            ++step;
            adam_step(params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps, step,
                      1.0 / double(bsz));
            epoch_loss += batch_loss;
            seen += bsz;
        }

        CurvePoint pt;
        pt.epoch = epoch + 1;  // curves are 1-based for reporting
        pt.loss = epoch_loss / double(seen);
        std::size_t probe = std::min(cfg.curve_probe_images, data.count());
        if (probe > 0) {
            double psum = 0.0, ssum = 0.0;
            for (std::size_t i = 0; i < probe; ++i) {
                Tensor xhat = model.autoencode(data.images[i]);
                double p = psnr(data.images[i], xhat);
                psum += std::min(p, 99.0);
                ssum += ssim(data.images[i], xhat);
            }
            pt.psnr = psum / double(probe);
            pt.ssim = ssum / double(probe);
        }
        result.curves.push_back(pt);
    }
    return result;
}

std::pair<Tensor, LinkDiagnostics> run_semantic_link(const Tensor& image, Autoencoder& model,
                                                     const ChannelConfig& channel,
                                                     std::uint64_t seed) {
    Tensor latent = model.transmit_features(image);
    BitStream tx = features_to_bits(latent);
    std::vector<double> symbols = bpsk_modulate(tx);
    auto [y, realization] = apply_channel(symbols, channel, seed);
    std::vector<std::complex<double>> h(symbols.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = realization.h_at(i);
    BitStream rx = bpsk_demodulate(y, h);
    Tensor latent_rx = bits_to_features(rx, latent.shape);
    Tensor xhat = model.decode_latent(latent_rx);

    LinkDiagnostics d;
    d.ber = ber(tx, rx);
    double p = psnr(image, xhat);
    d.psnr_capped = !std::isfinite(p);
    d.psnr_db = d.psnr_capped ? 99.0 : p;
    d.ssim = ssim(image, xhat);
    auto bw = bandwidth_ratio(model.latent_bits(), model.source_bits());
    d.bandwidth_ratio = bw.ratio;
    d.percent_saved = bw.percent_saved;
    return {std::move(xhat), d};
}

std::size_t worker_count() {
    if (const char* env = std::getenv("SEMCOMM_THREADS")) {
        long n = std::atol(env);
        if (n >= 1) return std::size_t(n);
    }
    return 1;
}

EvalReport evaluate(const std::vector<EvalJob>& jobs, std::uint64_t seed) {
    struct Cell {
        const EvalJob* job;
        const ChannelConfig* channel;
        std::size_t index;  // global row index
    };
    std::vector<Cell> cells;
    for (const auto& job : jobs)
        for (const auto& ch : job.channels) cells.push_back({&job, &ch, cells.size()});

    std::vector<EvalRow> rows(cells.size());
    auto run_cell = [&](const Cell& cell) {
        const EvalJob& job = *cell.job;
        std::uint64_t cell_seed = Rng(seed, cell.index + 1).next_u64();
        std::size_t n = std::min(job.max_images, job.dataset->count());
        if (n == 0) throw std::invalid_argument("evaluate: empty dataset " + job.dataset_name);
        double psum = 0.0, ssum = 0.0, bsum = 0.0, bw = 1.0;
        bool capped = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t img_seed = Rng(cell_seed, i + 1).next_u64();
            auto [xhat, diag] =
                run_semantic_link(job.dataset->images[i], *job.model, *cell.channel, img_seed);
            psum += diag.psnr_db;
            ssum += diag.ssim;
            bsum += diag.ber;
            bw = diag.bandwidth_ratio;
            capped = capped || diag.psnr_capped;
        }
        EvalRow r;
        r.dataset = job.dataset_name;
        r.model = job.model_name;
        r.channel = to_string(cell.channel->family);
        r.psnr_db = psum / double(n);
        r.psnr_capped = capped;
        r.ssim = ssum / double(n);
        r.ber = bsum / double(n);
        r.bandwidth_ratio = bw;
        rows[cell.index] = std::move(r);
    };

    std::size_t workers = std::min(worker_count(), cells.size());
    if (workers <= 1) {
        for (const auto& c : cells) run_cell(c);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < cells.size(); i += workers) run_cell(cells[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    EvalReport rep;
    rep.rows = std::move(rows);
    return rep;
}

}  // namespace semcomm
