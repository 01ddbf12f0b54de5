#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "semcomm/checkpoint.hpp"
#include "semcomm/config.hpp"
#include "semcomm/pipeline.hpp"

using namespace semcomm;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "experiment config file");
    cmd->add_option("--seed", o.seed, "root seed override")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--out", o.out_dir, "output directory");
}

ExperimentConfig load_config(const CommonOpts& o) {
    ExperimentConfig cfg =
        o.config_path.empty() ? parse_experiment_config("") : load_experiment_config(o.config_path);
    if (o.seed_set) {
        cfg.seed = o.seed;
        cfg.train.seed = o.seed;
    }
    return cfg;
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

void announce_seed(std::uint64_t seed) { std::printf("root seed: %llu\n", (unsigned long long)seed); }

int cmd_train(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o);
    announce_seed(cfg.seed);
    Dataset data = cfg.load_dataset();
    std::printf("dataset: %s, %zu images %zux%zux%zu\n", cfg.dataset_name.c_str(), data.count(),
                data.height, data.width, data.channels);
    auto model = cfg.make_model();
    std::printf("model: %s, %zu parameters\n", model->kind().c_str(), model->param_count());
    TrainResult result = train(*model, data, cfg.train);
    save_checkpoint(*model, out_path(o, "model.ckpt"));
    EvalReport report;
    report.curves = result.curves;
    atomic_write(out_path(o, "curves.csv"), report.curves_csv());
    std::printf("final loss: %s\n", format_double(result.curves.back().loss).c_str());
    std::printf("wrote %s and %s\n", out_path(o, "model.ckpt").c_str(),
                out_path(o, "curves.csv").c_str());
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& checkpoint) {
    ExperimentConfig cfg = load_config(o);
    announce_seed(cfg.seed);
    Dataset data = cfg.load_dataset();
    std::unique_ptr<Autoencoder> model =
        checkpoint.empty() ? cfg.make_model() : load_checkpoint(checkpoint);
    EvalJob job;
    job.dataset_name = cfg.dataset_name;
    job.dataset = &data;
    job.model_name = model->kind();
    job.model = model.get();
    job.channels = cfg.eval_channels;
    job.max_images = cfg.eval_images;
    EvalReport report = evaluate({job}, cfg.seed);
    report.notes.push_back("seed=" + std::to_string(cfg.seed));
    atomic_write(out_path(o, "eval.csv"), report.to_csv());
    atomic_write(out_path(o, "eval.json"), report.to_json());
    std::fputs(report.to_csv().c_str(), stdout);
    return 0;
}

int cmd_link(const CommonOpts& o, const std::string& checkpoint, const std::string& image_path,
             const std::string& channel_family, double noise_sigma) {
    ExperimentConfig cfg = load_config(o);
    announce_seed(cfg.seed);
    std::unique_ptr<Autoencoder> model =
        checkpoint.empty() ? cfg.make_model() : load_checkpoint(checkpoint);
    Shape img_shape = model->image_shape();
    Tensor image;
    if (image_path.empty()) {
        Dataset ds = synthesize_dataset(1, img_shape[0], img_shape[1], img_shape[2], cfg.seed);
        image = ds.images[0];
    } else {
        image = load_pnm(image_path);
        if (image.shape != img_shape)
            image = resize_bilinear(
                center_crop(image, std::min(image.shape[0], image.shape[1]),
                            std::min(image.shape[0], image.shape[1])),
                img_shape[0], img_shape[1]);
    }
    ChannelConfig ch = cfg.channel;
    if (!channel_family.empty()) ch.family = fading_family_from_string(channel_family);
    if (noise_sigma >= 0.0) ch.noise_sigma = noise_sigma;
    ch.validate();

    auto [output, diag] = run_semantic_link(image, *model, ch, cfg.seed);
    save_ppm(image, out_path(o, "link_input.ppm"));
    save_ppm(output, out_path(o, "link_output.ppm"));
    nlohmann::ordered_json j;
    j["channel"] = to_string(ch.family);
    j["noise_sigma"] = ch.noise_sigma;
    j["ber"] = diag.ber;
    j["psnr_db"] = diag.psnr_db;
    j["psnr_capped"] = diag.psnr_capped;
    j["ssim"] = diag.ssim;
    j["bandwidth_ratio"] = diag.bandwidth_ratio;
    j["percent_saved"] = diag.percent_saved;
    atomic_write(out_path(o, "link.json"), j.dump(2) + "\n");
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
}

int cmd_pdf(const CommonOpts& o, const std::string& family, double sigma, double k, double m,
            double omega, double rmax, std::size_t steps) {
    announce_seed(o.seed_set ? o.seed : 1);
    FadingFamily fam = fading_family_from_string(family);
    PdfParams p;
    p.sigma = sigma;
    p.k_factor = k;
    p.m = m;
    p.omega = omega;
    std::string csv = "family,r,density\n";
    double lo = fam == FadingFamily::awgn_only ? -rmax : 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
        double r = lo + (rmax - lo) * double(i) / double(steps);
        csv += to_string(fam) + "," + format_double(r) + "," +
               format_double(pdf_eval(fam, p, r)) + "\n";
    }
    atomic_write(out_path(o, "pdf.csv"), csv);
    std::printf("wrote %s (%zu points)\n", out_path(o, "pdf.csv").c_str(), steps + 1);
    return 0;
}

int cmd_selftest(const CommonOpts& o) {
    std::uint64_t seed = o.seed_set ? o.seed : 1;
    announce_seed(seed);
    std::size_t failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%-44s %s\n", name, ok ? "ok" : "FAIL");
        if (!ok) ++failures;
    };

    Rng rng(seed);
    double acc = 0.0;
    for (int i = 0; i < 100'000; ++i) acc += rng.uniform();
    check("rng uniform mean", std::abs(acc / 100'000 - 0.5) < 5e-3);

    double power = 0.0;
    for (int i = 0; i < 100'000; ++i) power += std::norm(sample_rayleigh(rng));
    check("rayleigh unit power", std::abs(power / 100'000 - 1.0) < 2e-2);

    check("rayleigh density at r=1",
          std::abs(pdf_eval(FadingFamily::rayleigh, PdfParams{}, 1.0) - std::exp(-0.5)) < 1e-12);

    Tensor f({4});
    for (auto& v : f.data) v = rng.uniform(-2.0, 2.0);
    Tensor back = bits_to_features(features_to_bits(f), f.shape);
    check("modem round trip", back.data == quantize_f32(f).data);

    ModelConfig mc = ModelConfig::toy();
    mc.image_h = mc.image_w = 8;
    mc.patch_size = 4;
    mc.embed_dim = 16;
    mc.encoder_layers = mc.decoder_layers = 1;
    mc.encoder_heads = mc.decoder_heads = 2;
    mc.latent_dim = 4;
    ViTAutoencoder model(mc, seed);
    Dataset ds = synthesize_dataset(1, 8, 8, 3, seed);
    ChannelConfig clean;
    clean.family = FadingFamily::none;
    auto [out, diag] = run_semantic_link(ds.images[0], model, clean, seed);
    check("noiseless link identity",
          diag.ber == 0.0 && out.data == model.decode_latent(model.transmit_features(ds.images[0])).data);

    auto ps = model.params();
    auto loss_fn = [&](bool with_grad) {
        if (with_grad)
            for (Param* p : ps) p->zero_grad();
        Tape t;
        Expr e = ad::mse_loss(model.decode_image_ad(t, model.encode_latent_ad(t, ds.images[0])),
                              ds.images[0]);
        if (with_grad) t.backward(e.id);
        return e.val().data[0];
    };
    // h = 1e-4: gradients at init are ~1e-11, so a smaller step drowns in
    // floating-point cancellation
    check("autodiff gradient check", grad_check(loss_fn, ps, 1e-4, 4) < 1e-4);

    std::printf("%zu failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic communication link simulator"};
    app.require_subcommand(1);

    CommonOpts train_o, eval_o, link_o, pdf_o, self_o;
    std::string eval_ckpt, link_ckpt, link_image, link_channel;
    double link_noise = -1.0;
    std::string pdf_family = "rayleigh";
    double pdf_sigma = 1.0, pdf_k = 0.0, pdf_m = 1.0, pdf_omega = 1.0, pdf_rmax = 5.0;
    std::size_t pdf_steps = 500;

    CLI::App* t = app.add_subcommand("train", "train a model and write checkpoint + curves");
    add_common(t, train_o);
    CLI::App* e = app.add_subcommand("eval", "evaluate a model across channels");
    add_common(e, eval_o);
    e->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate (default: fresh init)");
    CLI::App* l = app.add_subcommand("link", "run one image through the full bit-level link");
    add_common(l, link_o);
    l->add_option("--checkpoint", link_ckpt, "checkpoint to use (default: fresh init)");
    l->add_option("--image", link_image, "input PPM/PGM (default: synthesized)");
    l->add_option("--channel", link_channel, "fading family override");
    l->add_option("--noise", link_noise, "noise sigma override");
    CLI::App* p = app.add_subcommand("pdf", "tabulate a fading/noise density as CSV");
    add_common(p, pdf_o);
    p->add_option("--family", pdf_family, "rayleigh|rician|nakagami|awgn");
    p->add_option("--sigma", pdf_sigma, "rayleigh scale / gaussian std dev");
    p->add_option("--k", pdf_k, "rician K-factor");
    p->add_option("--m", pdf_m, "nakagami shape");
    p->add_option("--omega", pdf_omega, "nakagami mean power");
    p->add_option("--rmax", pdf_rmax, "upper end of the r grid");
    p->add_option("--steps", pdf_steps, "grid intervals");
    CLI::App* s = app.add_subcommand("selftest", "run the built-in invariant checks");
    add_common(s, self_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    try {
        if (t->parsed()) return cmd_train(train_o);
        if (e->parsed()) return cmd_eval(eval_o, eval_ckpt);
        if (l->parsed()) return cmd_link(link_o, link_ckpt, link_image, link_channel, link_noise);
        if (p->parsed()) return cmd_pdf(pdf_o, pdf_family, pdf_sigma, pdf_k, pdf_m, pdf_omega,
                                        pdf_rmax, pdf_steps);
        if (s->parsed()) return cmd_selftest(self_o);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 2;
}
