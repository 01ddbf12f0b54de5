#pragma once

#include <memory>
#include <string>

#include "semcomm/channel.hpp"
#include "semcomm/cnn.hpp"
#include "semcomm/pipeline.hpp"
#include "semcomm/vit.hpp"

namespace semcomm {

/// Experiment description parsed from a line-oriented key=value file with
/// [model] / [train] / [channel] / [data] / [eval] sections. Unknown keys
/// or sections are errors.
struct ExperimentConfig {
    std::string model_kind = "vit";  // vit | cnn
    ModelConfig vit = ModelConfig::toy();
    ConvConfig cnn;
    TrainConfig train;
    ChannelConfig channel;
    std::string dataset_kind = "synthetic";  // synthetic | cifar | folder
    std::string dataset_path;
    std::string dataset_name = "synthetic";
    std::size_t dataset_count = 512;  // synthetic only
    std::vector<ChannelConfig> eval_channels;
    std::size_t eval_images = 32;
    std::uint64_t seed = 1;

    Dataset load_dataset() const;
    std::unique_ptr<Autoencoder> make_model() const;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace semcomm
