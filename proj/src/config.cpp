#include "semcomm/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace semcomm {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
    throw std::invalid_argument("config: unknown key '" + key + "' in section [" + section + "]");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<std::string> eval_families;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            if (section != "model" && section != "train" && section != "channel" &&
                section != "data" && section != "eval")
                throw std::invalid_argument("config: unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto num = [&] { return std::stoul(val); };
        auto real = [&] { return std::stod(val); };

        if (section.empty()) {
            if (key == "seed")
                cfg.seed = std::stoull(val);
            else
                bad_key("(top level)", key);
        } else if (section == "model") {
            if (key == "kind") {
                if (val != "vit" && val != "cnn")
                    throw std::invalid_argument("config: unknown model kind '" + val + "'");
                cfg.model_kind = val;
            }
            else if (key == "image_h") { cfg.vit.image_h = num(); cfg.cnn.image_h = cfg.vit.image_h; }
            else if (key == "image_w") { cfg.vit.image_w = num(); cfg.cnn.image_w = cfg.vit.image_w; }
            else if (key == "channels") { cfg.vit.channels = num(); cfg.cnn.channels = cfg.vit.channels; }
            else if (key == "patch_size") cfg.vit.patch_size = num();
            else if (key == "embed_dim") cfg.vit.embed_dim = num();
            else if (key == "encoder_layers") cfg.vit.encoder_layers = num();
            else if (key == "encoder_heads") cfg.vit.encoder_heads = num();
            else if (key == "decoder_layers") cfg.vit.decoder_layers = num();
            else if (key == "decoder_heads") cfg.vit.decoder_heads = num();
            else if (key == "latent_dim") cfg.vit.latent_dim = num();
            else if (key == "bottleneck") cfg.cnn.bottleneck = num();
            else if (key == "conv_layers") {
                cfg.cnn.encoder.clear();
                std::istringstream ls(val);
                std::string item;
                while (std::getline(ls, item, ',')) {
                    ConvLayerSpec l;
                    if (std::sscanf(item.c_str(), "%zux%zux%zu", &l.kernel, &l.stride,
                                    &l.out_channels) != 3)
                        throw std::invalid_argument("config: bad conv layer spec " + item);
                    cfg.cnn.encoder.push_back(l);
                }
            } else bad_key(section, key);
        } else if (section == "train") {
            if (key == "epochs") cfg.train.epochs = num();
            else if (key == "batch_size") cfg.train.batch_size = num();
            else if (key == "learning_rate") cfg.train.learning_rate = real();
            else if (key == "beta1") cfg.train.beta1 = real();
            else if (key == "beta2") cfg.train.beta2 = real();
            else if (key == "noise_factor") cfg.train.noise_factor = real();
            else if (key == "family") cfg.train.train_family = fading_family_from_string(val);
            else if (key == "k_factor") cfg.train.k_factor = real();
            else if (key == "m") cfg.train.m = real();
            else if (key == "omega") cfg.train.omega = real();
            else bad_key(section, key);
        } else if (section == "channel") {
            if (key == "family") cfg.channel.family = fading_family_from_string(val);
            else if (key == "k_factor") cfg.channel.k_factor = real();
            else if (key == "m") cfg.channel.m = real();
            else if (key == "omega") cfg.channel.omega = real();
            else if (key == "noise_sigma") cfg.channel.noise_sigma = real();
            else if (key == "block_length") cfg.channel.block_length = num();
            else if (key == "gain") cfg.channel.gain = real();
            else bad_key(section, key);
        } else if (section == "data") {
            if (key == "kind") cfg.dataset_kind = val;
            else if (key == "path") cfg.dataset_path = val;
            else if (key == "name") cfg.dataset_name = val;
            else if (key == "count") cfg.dataset_count = num();
            else bad_key(section, key);
        } else if (section == "eval") {
            if (key == "families") {
                std::istringstream fs(val);
                std::string item;
                while (std::getline(fs, item, ',')) eval_families.push_back(trim(item));
            } else if (key == "images") {
                cfg.eval_images = num();
            } else bad_key(section, key);
        }
    }

    if (eval_families.empty()) eval_families = {"awgn", "rayleigh", "rician", "nakagami"};
    for (const auto& fam : eval_families) {
        ChannelConfig ch = cfg.channel;
        ch.family = fading_family_from_string(fam);
        cfg.eval_channels.push_back(ch);
    }
    cfg.train.seed = cfg.seed;
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_experiment_config(ss.str());
}

Dataset ExperimentConfig::load_dataset() const {
    if (dataset_kind == "synthetic")
        return synthesize_dataset(dataset_count, vit.image_h, vit.image_w, vit.channels,
                                  seed ^ 0xda7aULL);
    if (dataset_kind == "cifar") return load_cifar(dataset_path);
    if (dataset_kind == "folder")
        return load_image_folder(dataset_path, vit.image_h, vit.image_w, vit.channels);
    throw std::invalid_argument("config: unknown dataset kind " + dataset_kind);
}

std::unique_ptr<Autoencoder> ExperimentConfig::make_model() const {
    if (model_kind == "vit") return std::make_unique<ViTAutoencoder>(vit, seed);
    if (model_kind == "cnn") return std::make_unique<CnnAutoencoder>(cnn, seed);
    throw std::invalid_argument("config: unknown model kind " + model_kind);
}

}  // namespace semcomm
