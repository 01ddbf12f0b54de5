#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace semcomm {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t numel_of(const Shape& s);

/// Dense n-dimensional array of doubles in row-major order. The universal
/// value type for images, patches, embeddings and features.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(std::move(s)), data(numel_of(shape), 0.0) {}
    Tensor(Shape s, std::vector<double> d);

    static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
    static Tensor full(Shape s, double v);
    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    std::size_t numel() const { return data.size(); }
    std::size_t ndim() const { return shape.size(); }

    // 2-D accessors; checked dimensionality, unchecked indices.
    std::size_t rows() const;
    std::size_t cols() const;
    double& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

    Tensor reshaped(Shape s) const;
    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    bool all_finite() const;
};

// Dense kernels (Eigen-backed where it matters).
Tensor matmul(const Tensor& a, const Tensor& b);              // [m,k]x[k,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);           // a * b^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);           // a^T * b
Tensor transpose2d(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

/// Softmax along the last axis, max-subtracted for stability.
Tensor softmax_lastaxis(const Tensor& x);

/// Normalize each row of a 2-D tensor to zero mean / unit variance, then
/// apply per-column gain and bias.
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps = 1e-6);

double mse(const Tensor& a, const Tensor& b);

}  // namespace semcomm
