#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semcomm/tensor.hpp"

namespace semcomm {

/// Named trainable tensor plus Adam moment state.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;  // accumulated across a batch
    Tensor adam_m;
    Tensor adam_v;

    Param() = default;
    Param(std::string n, Tensor v)
        : name(std::move(n)),
          value(std::move(v)),
          grad(Tensor::zeros(value.shape)),
          adam_m(Tensor::zeros(value.shape)),
          adam_v(Tensor::zeros(value.shape)) {}

    void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

/// Reverse-mode tape. Nodes are recorded in construction order; backward()
/// walks them once in reverse, accumulating gradients additively so shared
/// inputs are handled correctly. One tape per thread.
class Tape {
public:
    struct Node {
        Tensor value;
        Tensor grad;
        bool needs_grad = false;
        std::function<void(Tape&, int self)> backward;  // empty for leaves
        Param* param = nullptr;               // set for parameter leaves
    };

    int leaf(Tensor value, bool needs_grad = false);
    int leaf_param(Param& p);

    const Tensor& value(int id) const { return nodes_[id].value; }
    Tensor& grad(int id) { return nodes_[id].grad; }
    bool needs_grad(int id) const { return nodes_[id].needs_grad; }

    int record(Tensor value, bool needs_grad, std::function<void(Tape&, int)> back);

    /// Seed d(loss)/d(loss) = 1 on a scalar node, run the reverse sweep and
    /// add each parameter leaf's gradient into its Param::grad.
    void backward(int loss_id);

    void add_to_grad(int id, const Tensor& g);

    std::size_t size() const { return nodes_.size(); }

private:
    std::vector<Node> nodes_;
};

/// Handle into a tape.
struct Expr {
    Tape* tape = nullptr;
    int id = -1;
    const Tensor& val() const { return tape->value(id); }
};

namespace ad {

Expr constant(Tape& t, Tensor v);
Expr param(Tape& t, Param& p);

Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr scale(Expr a, double c);
Expr add_const(Expr a, const Tensor& c);
Expr mul_const(Expr a, const Tensor& c);  // elementwise, c fixed
Expr add_rowvec(Expr x, Expr b);          // [m,n] + [n] broadcast over rows

Expr matmul(Expr a, Expr b);
Expr matmul_nt(Expr a, Expr b);  // a * b^T

Expr softmax_rows(Expr x);
Expr layer_norm(Expr x, Expr gain, Expr bias, double eps = 1e-6);

Expr gelu(Expr x);
Expr relu(Expr x);
Expr sigmoid(Expr x);

Expr slice_cols(Expr x, std::size_t c0, std::size_t n);
Expr slice_rows(Expr x, std::size_t r0, std::size_t n);
Expr concat_rows(const std::vector<Expr>& parts);
Expr concat_cols(const std::vector<Expr>& parts);
Expr reshape(Expr x, Shape s);

// image tensors are [H, W, C]; kernels [kh, kw, Cin, Cout]
Expr conv2d(Expr x, Expr w, Expr b, std::size_t stride);
Expr conv2d_transpose(Expr x, Expr w, Expr b, std::size_t stride, std::size_t out_pad_h,
                      std::size_t out_pad_w);

/// out.data[i] = x.data[src_index[i]]; src_index must be a bijection onto
/// x's index range (used for patch/pixel reorderings).
Expr permute(Expr x, const std::vector<std::size_t>& src_index, Shape out_shape);

Expr mse_loss(Expr x, const Tensor& target);

}  // namespace ad

/// Max over checked coordinates of |analytic - central difference| /
/// (|analytic| + |fd| + 1e-8).
///
/// `f(true)` must zero the parameter gradients, run forward + backward,
/// leave gradients in Param::grad and return the loss; `f(false)` runs the
/// forward pass only. With max_coords_per_param == 0 every coordinate is
/// checked, otherwise an evenly spaced subset per parameter.
/// Central differences are unreliable at non-smooth points (e.g. |x| at 0);
/// callers must keep such inputs out of the check.
double grad_check(const std::function<double(bool)>& f, const std::vector<Param*>& params,
                  double h = 1e-5, std::size_t max_coords_per_param = 0);

}  // namespace semcomm
