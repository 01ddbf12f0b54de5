#pragma once

#include <cstdint>
#include <utility>

#include "semcomm/channel.hpp"
#include "semcomm/dataset.hpp"
#include "semcomm/metrics.hpp"
#include "semcomm/model.hpp"
#include "semcomm/report.hpp"

namespace semcomm {

/// Training hyperparameters. The seed fixes every stochastic choice
/// (init is owned by the model; shuffling, fading draws and noise are
/// derived from this seed).
struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double noise_factor = 0.2;  // sigma of the train-time channel surrogate
    FadingFamily train_family = FadingFamily::rayleigh;
    double k_factor = 0.0;
    double m = 1.0;
    double omega = 1.0;
    std::uint64_t seed = 0;
    std::size_t curve_probe_images = 4;  // images used for per-epoch PSNR/SSIM curves

    void validate() const;
};

struct TrainResult {
    std::vector<CurvePoint> curves;  // one point per epoch
};

/// Algorithm: per step, encode; corrupt the latent with the differentiable
/// surrogate F~ = a*F + n (a = |h| from the configured fading family, n
/// Gaussian with sigma = noise_factor, both constants for the gradient
/// pass); decode; MSE loss; Adam update. Deterministic for a fixed seed.
/// Aborts with a diagnostic if the loss goes non-finite.
TrainResult train(Autoencoder& model, const Dataset& data, const TrainConfig& cfg);

void adam_step(const std::vector<Param*>& params, double lr, double beta1, double beta2,
               double eps, std::size_t step, double grad_scale);

struct LinkDiagnostics {
    double ber = 0.0;
    double psnr_db = 0.0;
    bool psnr_capped = false;
    double ssim = 0.0;
    double bandwidth_ratio = 1.0;
    double percent_saved = 0.0;
};

/// Full bit-level path: encode -> bottleneck -> IEEE 754 bits -> BPSK ->
/// channel -> coherent demod -> bits -> features (sanitized) -> decode.
std::pair<Tensor, LinkDiagnostics> run_semantic_link(const Tensor& image, Autoencoder& model,
                                                     const ChannelConfig& channel,
                                                     std::uint64_t seed);

struct EvalJob {
    std::string dataset_name;
    const Dataset* dataset = nullptr;
    std::string model_name;
    Autoencoder* model = nullptr;
    std::vector<ChannelConfig> channels;
    std::size_t max_images = 64;
};

/// One report row per (dataset, model, channel): mean PSNR/SSIM/BER over the
/// evaluation images, fixed per-cell seeds. Cells may run in parallel
/// (SEMCOMM_THREADS caps the worker count); row order is deterministic.
EvalReport evaluate(const std::vector<EvalJob>& jobs, std::uint64_t seed);

/// Worker cap from SEMCOMM_THREADS (default 1).
std::size_t worker_count();

}  // namespace semcomm
