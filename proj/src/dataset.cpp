#include "semcomm/dataset.hpp"

#include "semcomm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace semcomm {

namespace {

constexpr std::size_t kCifarRecord = 3073;  // 1 label + 32*32*3 planar pixels

std::vector<std::uint8_t> read_all(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

Dataset load_cifar(const std::string& path) {
    auto bytes = read_all(path);
    if (bytes.empty() || bytes.size() % kCifarRecord != 0)
        throw std::runtime_error("CIFAR format error in " + path + ": file length " +
                                 std::to_string(bytes.size()) + " is not a positive multiple of " +
                                 std::to_string(kCifarRecord) + " (trailing partial record at byte offset " +
                                 std::to_string(bytes.size() - bytes.size() % kCifarRecord) + ")");
    Dataset ds;
    ds.height = ds.width = 32;
    ds.channels = 3;
    std::size_t n = bytes.size() / kCifarRecord;
    ds.images.reserve(n);
    ds.labels.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::uint8_t* rec = bytes.data() + r * kCifarRecord;
        ds.labels.push_back(int(rec[0]));
        Tensor img({32, 32, 3});
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < 32; ++i)
                for (std::size_t j = 0; j < 32; ++j)
                    img.data[(i * 32 + j) * 3 + c] =
                        double(rec[1 + c * 1024 + i * 32 + j]) / 255.0;
        ds.images.push_back(std::move(img));
    }
    return ds;
}

void save_cifar(const Dataset& ds, const std::string& path) {
    if (ds.height != 32 || ds.width != 32 || ds.channels != 3)
        throw std::invalid_argument("save_cifar: dataset must be 32x32x3");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_cifar: cannot open " + path);
    for (std::size_t r = 0; r < ds.count(); ++r) {
        std::vector<std::uint8_t> rec(kCifarRecord, 0);
        rec[0] = std::uint8_t(r < ds.labels.size() ? ds.labels[r] & 0xff : 0);
        const Tensor& img = ds.images[r];
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < 32; ++i)
                for (std::size_t j = 0; j < 32; ++j) {
                    double v = std::clamp(img.data[(i * 32 + j) * 3 + c], 0.0, 1.0);
                    rec[1 + c * 1024 + i * 32 + j] = std::uint8_t(std::lround(v * 255.0));
                }
        f.write(reinterpret_cast<const char*>(rec.data()), std::streamsize(rec.size()));
    }
}

namespace {

// PNM header token reader; skips whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            tok.push_back(char(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(char(in.get()));
            return tok;
        }
    }
    throw std::runtime_error("truncated PNM header");
}

}  // namespace

Tensor load_pnm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string magic = pnm_token(f);
    std::size_t channels;
    if (magic == "P6")
        channels = 3;
    else if (magic == "P5")
        channels = 1;
    else
        throw std::runtime_error(path + ": unsupported PNM magic '" + magic + "'");
    std::size_t w = std::stoul(pnm_token(f));
    std::size_t h = std::stoul(pnm_token(f));
    std::size_t maxval = std::stoul(pnm_token(f));
    if (maxval == 0 || maxval > 255)
        throw std::runtime_error(path + ": unsupported maxval " + std::to_string(maxval));
    // consume the single whitespace byte separating header from raster
    if (!std::isspace(f.get())) throw std::runtime_error(path + ": malformed PNM header");
    std::vector<char> raw(h * w * channels);
    f.read(raw.data(), std::streamsize(raw.size()));
    if (std::size_t(f.gcount()) != raw.size())
        throw std::runtime_error(path + ": truncated raster");
    Tensor img({h, w, channels});
    for (std::size_t i = 0; i < img.numel(); ++i)
        img.data[i] = double(std::uint8_t(raw[i])) / double(maxval);
    return img;
}

void save_ppm(const Tensor& image, const std::string& path) {
    if (image.ndim() != 3 || (image.shape[2] != 3 && image.shape[2] != 1))
        throw std::invalid_argument("save_ppm: expected [H,W,3] or [H,W,1], got " +
                                    shape_str(image.shape));
    std::size_t h = image.shape[0], w = image.shape[1], c = image.shape[2];
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_ppm: cannot open " + path);
    f << (c == 3 ? "P6\n" : "P5\n") << w << " " << h << "\n255\n";
    std::vector<std::uint8_t> raw(h * w * c);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = std::clamp(image.data[i], 0.0, 1.0);
        raw[i] = std::uint8_t(std::lround(v * 255.0));
    }
    f.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
}

Dataset synthesize_dataset(std::size_t count, std::size_t h, std::size_t w, std::size_t c,
                           std::uint64_t seed) {
    Rng rng(seed, 0xda7a);
    Dataset ds;
    ds.height = h;
    ds.width = w;
    ds.channels = c;
    ds.split_tag = "synthetic";
    for (std::size_t n = 0; n < count; ++n) {
        Tensor img({h, w, c});
        // background: random linear gradient per channel
        std::vector<double> gx(c), gy(c), g0(c);
        for (std::size_t k = 0; k < c; ++k) {
            gx[k] = rng.uniform(-0.5, 0.5);
            gy[k] = rng.uniform(-0.5, 0.5);
            g0[k] = rng.uniform(0.2, 0.8);
        }
        double cx = rng.uniform(0.2, 0.8) * double(w);
        double cy = rng.uniform(0.2, 0.8) * double(h);
        double rad = rng.uniform(0.1, 0.35) * double(std::min(h, w));
        std::vector<double> disc(c);
        for (std::size_t k = 0; k < c; ++k) disc[k] = rng.uniform(0.0, 1.0);
        double fx = rng.uniform(0.5, 3.0) * 2.0 * M_PI / double(w);
        double fy = rng.uniform(0.5, 3.0) * 2.0 * M_PI / double(h);
        double amp = rng.uniform(0.0, 0.15);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                double wave = amp * std::sin(fx * double(j) + fy * double(i));
                double dx = (double(j) - cx) / rad;
                double dy = (double(i) - cy) / rad;
                double d2 = dx * dx + dy * dy;
                // soft-edged disc
                double blend = d2 < 1.0 ? 1.0 - d2 * d2 : 0.0;
                for (std::size_t k = 0; k < c; ++k) {
                    double v = g0[k] + gx[k] * double(j) / double(w) +
                               gy[k] * double(i) / double(h) + wave;
                    v = (1.0 - blend) * v + blend * disc[k];
                    img.data[(i * w + j) * c + k] = std::clamp(v, 0.0, 1.0);
                }
            }
        ds.images.push_back(std::move(img));
        ds.labels.push_back(int(n % 10));
    }
    return ds;
}

Tensor center_crop(const Tensor& image, std::size_t crop_h, std::size_t crop_w) {
    std::size_t h = image.shape[0], w = image.shape[1], c = image.shape[2];
    if (crop_h > h || crop_w > w)
        throw std::invalid_argument("center_crop: crop larger than image");
    std::size_t i0 = (h - crop_h) / 2, j0 = (w - crop_w) / 2;
    Tensor out({crop_h, crop_w, c});
    for (std::size_t i = 0; i < crop_h; ++i)
        for (std::size_t j = 0; j < crop_w; ++j)
            for (std::size_t k = 0; k < c; ++k)
                out.data[(i * crop_w + j) * c + k] = image.data[((i0 + i) * w + j0 + j) * c + k];
    return out;
}

Tensor resize_bilinear(const Tensor& image, std::size_t out_h, std::size_t out_w) {
    std::size_t h = image.shape[0], w = image.shape[1], c = image.shape[2];
    if (out_h == h && out_w == w) return image;  // bit-identical pass-through
    Tensor out({out_h, out_w, c});
    double sy = double(h) / double(out_h);
    double sx = double(w) / double(out_w);
    for (std::size_t i = 0; i < out_h; ++i) {
        double fy = (double(i) + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, double(h - 1));
        std::size_t y0 = std::size_t(fy);
        std::size_t y1 = std::min(y0 + 1, h - 1);
        double wy = fy - double(y0);
        for (std::size_t j = 0; j < out_w; ++j) {
            double fx = (double(j) + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, double(w - 1));
            std::size_t x0 = std::size_t(fx);
            std::size_t x1 = std::min(x0 + 1, w - 1);
            double wx = fx - double(x0);
            for (std::size_t k = 0; k < c; ++k) {
                auto px = [&](std::size_t y, std::size_t x) {
                    return image.data[(y * w + x) * c + k];
                };
                double top = px(y0, x0) * (1.0 - wx) + px(y0, x1) * wx;
                double bot = px(y1, x0) * (1.0 - wx) + px(y1, x1) * wx;
                out.data[(i * out_w + j) * c + k] = top * (1.0 - wy) + bot * wy;
            }
        }
    }
    return out;
}

namespace {

Tensor to_channels(const Tensor& img, std::size_t target_c) {
    std::size_t c = img.shape[2];
    if (c == target_c) return img;
    std::size_t h = img.shape[0], w = img.shape[1];
    Tensor out({h, w, target_c});
    for (std::size_t i = 0; i < h * w; ++i) {
        if (c == 1) {
            for (std::size_t k = 0; k < target_c; ++k) out.data[i * target_c + k] = img.data[i];
        } else {
            double mean = 0.0;
            for (std::size_t k = 0; k < c; ++k) mean += img.data[i * c + k];
            mean /= double(c);
            for (std::size_t k = 0; k < target_c; ++k)
                out.data[i * target_c + k] = target_c == 1 ? mean : img.data[i * c + std::min(k, c - 1)];
        }
    }
    return out;
}

}  // namespace

Dataset load_image_folder(const std::string& path, std::size_t target_h, std::size_t target_w,
                          std::size_t target_channels) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(path)) throw std::runtime_error(path + " is not a directory");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(path))
        if (e.is_regular_file()) files.push_back(e.path().string());
    std::sort(files.begin(), files.end());

    Dataset ds;
    ds.height = target_h;
    ds.width = target_w;
    ds.channels = target_channels;
    for (const auto& f : files) {
        Tensor img;
        try {
            img = load_pnm(f);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: skipping %s: %s\n", f.c_str(), e.what());
            continue;
        }
        img = to_channels(img, target_channels);
        std::size_t h = img.shape[0], w = img.shape[1];
        if (h != target_h || w != target_w) {
            // crop to target aspect, then resample
            double scale = std::min(double(h) / double(target_h), double(w) / double(target_w));
            std::size_t ch = std::min(h, std::size_t(std::lround(scale * double(target_h))));
            std::size_t cw = std::min(w, std::size_t(std::lround(scale * double(target_w))));
            img = resize_bilinear(center_crop(img, std::max<std::size_t>(ch, 1),
                                              std::max<std::size_t>(cw, 1)),
                                  target_h, target_w);
        }
        ds.images.push_back(std::move(img));
        ds.labels.push_back(-1);
    }
    if (ds.images.empty()) throw std::runtime_error("no decodable images in " + path);
    return ds;
}

}  // namespace semcomm
