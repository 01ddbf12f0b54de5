#include "semcomm/model.hpp"

namespace semcomm {

Tensor quantize_f32(const Tensor& t) {
    Tensor out = t;
    for (auto& v : out.data) v = double(float(v));
    return out;
}

std::size_t Autoencoder::param_count() {
    std::size_t n = 0;
    for (Param* p : params()) n += p->value.numel();
    return n;
}

Tensor Autoencoder::transmit_features(const Tensor& image) {
    Tape t;
    return quantize_f32(encode_latent_ad(t, image).val());
}

Tensor Autoencoder::decode_latent(const Tensor& latent) {
    Tape t;
    return decode_image_ad(t, ad::constant(t, latent)).val();
}

Tensor Autoencoder::autoencode(const Tensor& image) {
    return decode_latent(transmit_features(image));
}

}  // namespace semcomm
