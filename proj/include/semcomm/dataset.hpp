#pragma once

#include <string>
#include <vector>

#include "semcomm/tensor.hpp"

namespace semcomm {

/// Images scaled to [0,1], shape [count, H, W, C]; labels kept but unused.
struct Dataset {
    std::size_t height = 0, width = 0, channels = 0;
    std::vector<Tensor> images;  // each [H, W, C]
    std::vector<int> labels;
    std::string split_tag;

    std::size_t count() const { return images.size(); }
};

/// Parse the CIFAR binary batch layout: records of exactly 3073 bytes
/// (1 label byte + 3072 pixel bytes, planar R,G,B row-major), pixels / 255.
Dataset load_cifar(const std::string& path);

/// Read a directory of binary PPM (P6) / PGM (P5) files, center-crop to the
/// target aspect ratio and bilinearly resize to target_h x target_w.
/// Images already at the target size pass through untouched. Undecodable
/// files are skipped with a warning on stderr; an empty result is an error.
Dataset load_image_folder(const std::string& path, std::size_t target_h, std::size_t target_w,
                          std::size_t target_channels = 3);

Tensor load_pnm(const std::string& path);  // [H, W, C] in [0,1]
void save_ppm(const Tensor& image, const std::string& path);

/// Serialize a 32x32x3 dataset back to the CIFAR binary batch layout.
void save_cifar(const Dataset& ds, const std::string& path);

/// Procedurally generated smooth images (gradients, discs, sinusoids);
/// structured enough to be learnable at desk scale. Deterministic in seed.
Dataset synthesize_dataset(std::size_t count, std::size_t h, std::size_t w, std::size_t c,
                           std::uint64_t seed);

Tensor center_crop(const Tensor& image, std::size_t crop_h, std::size_t crop_w);
/// Bilinear resample; exact pass-through when the size already matches.
Tensor resize_bilinear(const Tensor& image, std::size_t out_h, std::size_t out_w);

}  // namespace semcomm
