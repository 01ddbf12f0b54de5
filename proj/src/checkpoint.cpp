#include "semcomm/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace semcomm {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'M', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw std::runtime_error("checkpoint: truncated file");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("checkpoint config: bad line " + line);
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

std::size_t kv_num(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("checkpoint config: missing key " + key);
    return std::stoul(it->second);
}

}  // namespace

void atomic_write(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    fs::path tmp = dir / (target.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        f.write(bytes.data(), std::streamsize(bytes.size()));
        if (!f) throw std::runtime_error("atomic_write: short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string model_config_text(const ModelConfig& c) {
    std::ostringstream o;
    o << "image_h=" << c.image_h << "\nimage_w=" << c.image_w << "\nchannels=" << c.channels
      << "\npatch_size=" << c.patch_size << "\nembed_dim=" << c.embed_dim
      << "\nencoder_layers=" << c.encoder_layers << "\nencoder_heads=" << c.encoder_heads
      << "\ndecoder_layers=" << c.decoder_layers << "\ndecoder_heads=" << c.decoder_heads
      << "\nlatent_dim=" << c.latent_dim << "\n";
    return o.str();
}

ModelConfig parse_model_config_text(const std::string& text) {
    auto kv = parse_kv(text);
    ModelConfig c;
    c.image_h = kv_num(kv, "image_h");
    c.image_w = kv_num(kv, "image_w");
    c.channels = kv_num(kv, "channels");
    c.patch_size = kv_num(kv, "patch_size");
    c.embed_dim = kv_num(kv, "embed_dim");
    c.encoder_layers = kv_num(kv, "encoder_layers");
    c.encoder_heads = kv_num(kv, "encoder_heads");
    c.decoder_layers = kv_num(kv, "decoder_layers");
    c.decoder_heads = kv_num(kv, "decoder_heads");
    c.latent_dim = kv_num(kv, "latent_dim");
    return c;
}

std::string conv_config_text(const ConvConfig& c) {
    std::ostringstream o;
    o << "image_h=" << c.image_h << "\nimage_w=" << c.image_w << "\nchannels=" << c.channels
      << "\nbottleneck=" << c.bottleneck << "\nencoder=";
    for (std::size_t i = 0; i < c.encoder.size(); ++i) {
        if (i) o << ",";
        o << c.encoder[i].kernel << "x" << c.encoder[i].stride << "x" << c.encoder[i].out_channels;
    }
    o << "\n";
    return o.str();
}

ConvConfig parse_conv_config_text(const std::string& text) {
    auto kv = parse_kv(text);
    ConvConfig c;
    c.image_h = kv_num(kv, "image_h");
    c.image_w = kv_num(kv, "image_w");
    c.channels = kv_num(kv, "channels");
    c.bottleneck = kv_num(kv, "bottleneck");
    c.encoder.clear();
    std::istringstream layers(kv.at("encoder"));
    std::string item;
    while (std::getline(layers, item, ',')) {
        ConvLayerSpec l;
        if (std::sscanf(item.c_str(), "%zux%zux%zu", &l.kernel, &l.stride, &l.out_channels) != 3)
            throw std::runtime_error("checkpoint config: bad conv layer spec " + item);
        c.encoder.push_back(l);
    }
    return c;
}

void save_checkpoint(Autoencoder& model, const std::string& path) {
    std::string cfg;
    if (auto* v = dynamic_cast<ViTAutoencoder*>(&model))
        cfg = model_config_text(v->config());
    else if (auto* c = dynamic_cast<CnnAutoencoder*>(&model))
        cfg = conv_config_text(c->config());
    else
        throw std::invalid_argument("save_checkpoint: unknown model kind");

    std::string out(kMagic, 8);
    std::string kind = model.kind();
    put_u32(out, std::uint32_t(kind.size()));
    out += kind;
    put_u32(out, std::uint32_t(cfg.size()));
    out += cfg;

    auto params = model.params();
    put_u64(out, params.size());
    for (Param* p : params) {
        put_u32(out, std::uint32_t(p->name.size()));
        out += p->name;
        put_u32(out, std::uint32_t(p->value.ndim()));
        for (auto e : p->value.shape) put_u64(out, e);
        for (double v : p->value.data) {
            auto bits = std::bit_cast<std::uint32_t>(float(v));
            put_u32(out, bits);
        }
    }
    atomic_write(path, out);
}

std::unique_ptr<Autoencoder> load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r{buf};
    if (r.str(8) != std::string(kMagic, 8))
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    std::string kind = r.str(r.u32());
    std::string cfg = r.str(r.u32());

    std::unique_ptr<Autoencoder> model;
    if (kind == "vit")
        model = std::make_unique<ViTAutoencoder>(parse_model_config_text(cfg), 0);
    else if (kind == "cnn")
        model = std::make_unique<CnnAutoencoder>(parse_conv_config_text(cfg), 0);
    else
        throw std::runtime_error("load_checkpoint: unknown model kind " + kind);

    auto params = model->params();
    std::uint64_t n = r.u64();
    if (n != params.size())
        throw std::runtime_error("load_checkpoint: parameter count mismatch in " + path);
    for (Param* p : params) {
        std::string name = r.str(r.u32());
        if (name != p->name)
            throw std::runtime_error("load_checkpoint: expected block " + p->name + ", found " + name);
        std::uint32_t nd = r.u32();
        Shape s;
        for (std::uint32_t i = 0; i < nd; ++i) s.push_back(r.u64());
        if (s != p->value.shape)
            throw std::runtime_error("load_checkpoint: shape mismatch for " + name);
        for (auto& v : p->value.data) v = double(std::bit_cast<float>(r.u32()));
    }
    return model;
}

}  // namespace semcomm
