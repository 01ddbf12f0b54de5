#include "semcomm/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace semcomm {

std::string shape_str(const Shape& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + ")";
}

std::size_t numel_of(const Shape& s) {
    std::size_t n = 1;
    for (auto e : s) {
        if (e == 0) throw std::invalid_argument("zero extent in shape " + shape_str(s));
        n *= e;
    }
    return n;
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (numel_of(shape) != data.size())
        throw std::invalid_argument("shape " + shape_str(shape) + " does not match data length " +
                                    std::to_string(data.size()));
}

Tensor Tensor::full(Shape s, double v) {
    Tensor t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
}

std::size_t Tensor::rows() const {
    if (shape.size() != 2) throw std::invalid_argument("rows() on non-2D tensor " + shape_str(shape));
    return shape[0];
}

std::size_t Tensor::cols() const {
    if (shape.size() != 2) throw std::invalid_argument("cols() on non-2D tensor " + shape_str(shape));
    return shape[1];
}

Tensor Tensor::reshaped(Shape s) const {
    if (numel_of(s) != numel())
        throw std::invalid_argument("cannot reshape " + shape_str(shape) + " to " + shape_str(s));
    Tensor t;
    t.shape = std::move(s);
    t.data = data;
    return t;
}

bool Tensor::all_finite() const {
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

namespace {

using CMat = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using MMat = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void check2d(const Tensor& t, const char* who) {
    if (t.ndim() != 2)
        throw std::invalid_argument(std::string(who) + ": expected 2-D tensor, got " + shape_str(t.shape));
}

void check_same(const Tensor& a, const Tensor& b, const char* who) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(who) + ": shape mismatch " + shape_str(a.shape) +
                                    " vs " + shape_str(b.shape));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    check2d(a, "matmul");
    check2d(b, "matmul");
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: shape mismatch " + shape_str(a.shape) + " vs " +
                                    shape_str(b.shape));
    Tensor out({a.rows(), b.cols()});
    MMat(out.data.data(), a.rows(), b.cols()) =
        CMat(a.data.data(), a.rows(), a.cols()) * CMat(b.data.data(), b.rows(), b.cols());
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    check2d(a, "matmul_nt");
    check2d(b, "matmul_nt");
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_nt: shape mismatch " + shape_str(a.shape) + " vs " +
                                    shape_str(b.shape));
    Tensor out({a.rows(), b.rows()});
    MMat(out.data.data(), a.rows(), b.rows()) =
        CMat(a.data.data(), a.rows(), a.cols()) * CMat(b.data.data(), b.rows(), b.cols()).transpose();
    return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    check2d(a, "matmul_tn");
    check2d(b, "matmul_tn");
    if (a.rows() != b.rows())
        throw std::invalid_argument("matmul_tn: shape mismatch " + shape_str(a.shape) + " vs " +
                                    shape_str(b.shape));
    Tensor out({a.cols(), b.cols()});
    MMat(out.data.data(), a.cols(), b.cols()) =
        CMat(a.data.data(), a.rows(), a.cols()).transpose() * CMat(b.data.data(), b.rows(), b.cols());
    return out;
}

Tensor transpose2d(const Tensor& a) {
    check2d(a, "transpose2d");
    Tensor out({a.cols(), a.rows()});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    check_same(a, b, "add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += b.data[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same(a, b, "sub");
    Tensor out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] -= b.data[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same(a, b, "mul");
    Tensor out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= b.data[i];
    return out;
}

Tensor scale(const Tensor& a, double c) {
    Tensor out = a;
    for (auto& v : out.data) v *= c;
    return out;
}

Tensor softmax_lastaxis(const Tensor& x) {
    if (x.shape.empty()) throw std::invalid_argument("softmax: empty tensor");
    std::size_t n = x.shape.back();
    std::size_t rows = x.numel() / n;
    Tensor out = x;
    for (std::size_t r = 0; r < rows; ++r) {
        double* p = out.data.data() + r * n;
        double mx = *std::max_element(p, p + n);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            p[j] = std::exp(p[j] - mx);
            sum += p[j];
        }
        for (std::size_t j = 0; j < n; ++j) p[j] /= sum;
    }
    return out;
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
    check2d(x, "layer_norm");
    std::size_t n = x.cols();
    if (n < 2) throw std::invalid_argument("layer_norm: normalized extent must be >= 2");
    if (gain.numel() != n || bias.numel() != n)
        throw std::invalid_argument("layer_norm: gain/bias length must equal row width");
    Tensor out = x;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double* p = out.data.data() + r * n;
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += p[j];
        mean /= double(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) var += (p[j] - mean) * (p[j] - mean);
        var /= double(n);
        double inv = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < n; ++j)
            p[j] = (p[j] - mean) * inv * gain.data[j] + bias.data[j];
    }
    return out;
}

double mse(const Tensor& a, const Tensor& b) {
    check_same(a, b, "mse");
    double s = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return s / double(a.numel());
}

}  // namespace semcomm
