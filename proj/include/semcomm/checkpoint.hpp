#pragma once

#include <memory>
#include <string>

#include "semcomm/cnn.hpp"
#include "semcomm/vit.hpp"

namespace semcomm {

/// Write bytes to a temp file in the target directory, then rename into
/// place. A killed run never leaves a truncated file at `path`.
void atomic_write(const std::string& path, const std::string& bytes);

/// Self-describing weight container: magic + model kind + config text,
/// followed by named little-endian float32 parameter blocks in the model's
/// canonical parameter order. Layout documented in README.
void save_checkpoint(Autoencoder& model, const std::string& path);

/// Reconstructs the model (ViT or CNN) from the embedded config and loads
/// all parameter blocks; names and shapes must match exactly.
std::unique_ptr<Autoencoder> load_checkpoint(const std::string& path);

std::string model_config_text(const ModelConfig& c);
std::string conv_config_text(const ConvConfig& c);
ModelConfig parse_model_config_text(const std::string& text);
ConvConfig parse_conv_config_text(const std::string& text);

}  // namespace semcomm
