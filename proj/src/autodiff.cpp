#include "semcomm/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace semcomm {

int Tape::leaf(Tensor value, bool needs_grad) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
}

int Tape::leaf_param(Param& p) {
    int id = leaf(p.value, true);
    nodes_[id].param = &p;
    return id;
}

int Tape::record(Tensor value, bool needs_grad, std::function<void(Tape&, int)> back) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    if (needs_grad) n.backward = std::move(back);
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
}

void Tape::add_to_grad(int id, const Tensor& g) {
    Node& n = nodes_[id];
    if (!n.needs_grad) return;
    if (n.grad.data.empty()) n.grad = Tensor::zeros(n.value.shape);
    for (std::size_t i = 0; i < g.numel(); ++i) n.grad.data[i] += g.data[i];
}

void Tape::backward(int loss_id) {
    if (nodes_[loss_id].value.numel() != 1)
        throw std::invalid_argument("backward: loss must be scalar");
    nodes_[loss_id].grad = Tensor::full(nodes_[loss_id].value.shape, 1.0);
    for (int i = loss_id; i >= 0; --i) {
        // each node is visited exactly once
        Node& n = nodes_[i];
        if (!n.needs_grad || n.grad.data.empty()) continue;
        if (n.backward) n.backward(*this, i);
        if (n.param) {
            for (std::size_t k = 0; k < n.grad.numel(); ++k) n.param->grad.data[k] += n.grad.data[k];
        }
    }
}

namespace ad {

namespace {

bool ng2(Expr a, Expr b) { return a.tape->needs_grad(a.id) || b.tape->needs_grad(b.id); }

Expr make(Tape& t, Tensor v, bool ng, std::function<void(Tape&, int)> back) {
    return Expr{&t, t.record(std::move(v), ng, std::move(back))};
}

}  // namespace

Expr constant(Tape& t, Tensor v) { return Expr{&t, t.leaf(std::move(v), false)}; }

Expr param(Tape& t, Param& p) { return Expr{&t, t.leaf_param(p)}; }

Expr add(Expr a, Expr b) {
    Tape& t = *a.tape;
    int ai = a.id, bi = b.id;
    return make(t, semcomm::add(a.val(), b.val()), ng2(a, b), [ai, bi](Tape& tp, int self) {
        tp.add_to_grad(ai, tp.grad(self));
        tp.add_to_grad(bi, tp.grad(self));
    });
}

Expr sub(Expr a, Expr b) {
    Tape& t = *a.tape;
    int ai = a.id, bi = b.id;
    return make(t, semcomm::sub(a.val(), b.val()), ng2(a, b), [ai, bi](Tape& tp, int self) {
        tp.add_to_grad(ai, tp.grad(self));
        tp.add_to_grad(bi, semcomm::scale(tp.grad(self), -1.0));
    });
}

Expr mul(Expr a, Expr b) {
    Tape& t = *a.tape;
    int ai = a.id, bi = b.id;
    return make(t, semcomm::mul(a.val(), b.val()), ng2(a, b), [ai, bi](Tape& tp, int self) {
        tp.add_to_grad(ai, semcomm::mul(tp.grad(self), tp.value(bi)));
        tp.add_to_grad(bi, semcomm::mul(tp.grad(self), tp.value(ai)));
    });
}

Expr scale(Expr a, double c) {
    Tape& t = *a.tape;
    int ai = a.id;
    return make(t, semcomm::scale(a.val(), c), t.needs_grad(ai), [ai, c](Tape& tp, int self) {
        tp.add_to_grad(ai, semcomm::scale(tp.grad(self), c));
    });
}

Expr add_const(Expr a, const Tensor& c) {
    Tape& t = *a.tape;
    int ai = a.id;
    return make(t, semcomm::add(a.val(), c), t.needs_grad(ai),
                [ai](Tape& tp, int self) { tp.add_to_grad(ai, tp.grad(self)); });
}

Expr mul_const(Expr a, const Tensor& c) {
    Tape& t = *a.tape;
    int ai = a.id;
    Tensor cc = c;
    return make(t, semcomm::mul(a.val(), c), t.needs_grad(ai), [ai, cc](Tape& tp, int self) {
        tp.add_to_grad(ai, semcomm::mul(tp.grad(self), cc));
    });
}

Expr add_rowvec(Expr x, Expr b) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    const Tensor& bv = b.val();
    std::size_t m = xv.rows(), n = xv.cols();
    if (bv.numel() != n)
        throw std::invalid_argument("add_rowvec: width mismatch " + shape_str(xv.shape) + " vs " +
                                    shape_str(bv.shape));
    Tensor out = xv;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.data[i * n + j] += bv.data[j];
    int xi = x.id, bi = b.id;
    return make(t, std::move(out), ng2(x, b), [xi, bi, m, n](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        tp.add_to_grad(xi, g);
        Tensor gb = Tensor::zeros(tp.value(bi).shape);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gb.data[j] += g.data[i * n + j];
        tp.add_to_grad(bi, gb);
    });
}

Expr matmul(Expr a, Expr b) {
    Tape& t = *a.tape;
    int ai = a.id, bi = b.id;
    return make(t, semcomm::matmul(a.val(), b.val()), ng2(a, b), [ai, bi](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        tp.add_to_grad(ai, semcomm::matmul_nt(g, tp.value(bi)));
        tp.add_to_grad(bi, semcomm::matmul_tn(tp.value(ai), g));
    });
}

Expr matmul_nt(Expr a, Expr b) {
    Tape& t = *a.tape;
    int ai = a.id, bi = b.id;
    return make(t, semcomm::matmul_nt(a.val(), b.val()), ng2(a, b), [ai, bi](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        tp.add_to_grad(ai, semcomm::matmul(g, tp.value(bi)));
        tp.add_to_grad(bi, semcomm::matmul_tn(g, tp.value(ai)));
    });
}

Expr softmax_rows(Expr x) {
    Tape& t = *x.tape;
    Tensor s = semcomm::softmax_lastaxis(x.val());
    int xi = x.id;
    return make(t, std::move(s), t.needs_grad(xi), [xi](Tape& tp, int self) {
        const Tensor& s = tp.value(self);
        const Tensor& g = tp.grad(self);
        std::size_t n = s.shape.back();
        std::size_t rows = s.numel() / n;
        Tensor gx = Tensor::zeros(s.shape);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* sp = s.data.data() + r * n;
            const double* gp = g.data.data() + r * n;
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += sp[j] * gp[j];
            double* o = gx.data.data() + r * n;
            for (std::size_t j = 0; j < n; ++j) o[j] = sp[j] * (gp[j] - dot);
        }
        tp.add_to_grad(xi, gx);
    });
}

Expr layer_norm(Expr x, Expr gain, Expr bias, double eps) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    Tensor out = semcomm::layer_norm_rows(xv, gain.val(), bias.val(), eps);
    bool ng = ng2(x, gain) || t.needs_grad(bias.id);
    int xi = x.id, gi = gain.id, bi = bias.id;
    return make(t, std::move(out), ng, [xi, gi, bi, eps](Tape& tp, int self) {
        const Tensor& xv = tp.value(xi);
        const Tensor& gv = tp.value(gi);
        const Tensor& g = tp.grad(self);
        std::size_t m = xv.rows(), n = xv.cols();
        Tensor gx = Tensor::zeros(xv.shape);
        Tensor ggain = Tensor::zeros(gv.shape);
        Tensor gbias = Tensor::zeros(gv.shape);
        for (std::size_t r = 0; r < m; ++r) {
            const double* xp = xv.data.data() + r * n;
            const double* gp = g.data.data() + r * n;
            double mean = 0.0;
            for (std::size_t j = 0; j < n; ++j) mean += xp[j];
            mean /= double(n);
            double var = 0.0;
            for (std::size_t j = 0; j < n; ++j) var += (xp[j] - mean) * (xp[j] - mean);
            var /= double(n);
            double inv = 1.0 / std::sqrt(var + eps);
            // dL/dxhat_j = g_j * gain_j; standard layer-norm backward
            double sum_gh = 0.0, sum_gh_xhat = 0.0;
            std::vector<double> xhat(n), gh(n);
            for (std::size_t j = 0; j < n; ++j) {
                xhat[j] = (xp[j] - mean) * inv;
                gh[j] = gp[j] * gv.data[j];
                sum_gh += gh[j];
                sum_gh_xhat += gh[j] * xhat[j];
            }
            double* o = gx.data.data() + r * n;
            for (std::size_t j = 0; j < n; ++j) {
                o[j] = inv * (gh[j] - sum_gh / double(n) - xhat[j] * sum_gh_xhat / double(n));
                ggain.data[j] += gp[j] * xhat[j];
                gbias.data[j] += gp[j];
            }
        }
        tp.add_to_grad(xi, gx);
        tp.add_to_grad(gi, ggain);
        tp.add_to_grad(bi, gbias);
    });
}

namespace {

double gelu_f(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }
double gelu_df(double x) {
    double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    return cdf + x * pdf;
}

Expr unary(Expr x, double (*f)(double), double (*df)(double)) {
    Tape& t = *x.tape;
    Tensor out = x.val();
    for (auto& v : out.data) v = f(v);
    int xi = x.id;
    return make(t, std::move(out), t.needs_grad(xi), [xi, df](Tape& tp, int self) {
        const Tensor& xv = tp.value(xi);
        const Tensor& g = tp.grad(self);
        Tensor gx = Tensor::zeros(xv.shape);
        for (std::size_t i = 0; i < xv.numel(); ++i) gx.data[i] = g.data[i] * df(xv.data[i]);
        tp.add_to_grad(xi, gx);
    });
}

double relu_f(double x) { return x > 0.0 ? x : 0.0; }
double relu_df(double x) { return x > 0.0 ? 1.0 : 0.0; }
double sigmoid_f(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double sigmoid_df(double x) {
    double s = sigmoid_f(x);
    return s * (1.0 - s);
}

}  // namespace

Expr gelu(Expr x) { return unary(x, gelu_f, gelu_df); }
Expr relu(Expr x) { return unary(x, relu_f, relu_df); }
Expr sigmoid(Expr x) { return unary(x, sigmoid_f, sigmoid_df); }

Expr slice_cols(Expr x, std::size_t c0, std::size_t n) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    std::size_t m = xv.rows(), w = xv.cols();
    if (c0 + n > w) throw std::invalid_argument("slice_cols out of range");
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.data[i * n + j] = xv.data[i * w + c0 + j];
    int xi = x.id;
    return make(t, std::move(out), t.needs_grad(xi), [xi, c0, n, m, w](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        Tensor gx = Tensor::zeros({m, w});
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gx.data[i * w + c0 + j] = g.data[i * n + j];
        tp.add_to_grad(xi, gx);
    });
}

Expr slice_rows(Expr x, std::size_t r0, std::size_t n) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    std::size_t m = xv.rows(), w = xv.cols();
    if (r0 + n > m) throw std::invalid_argument("slice_rows out of range");
    Tensor out({n, w});
    std::copy(xv.data.begin() + r0 * w, xv.data.begin() + (r0 + n) * w, out.data.begin());
    int xi = x.id;
    return make(t, std::move(out), t.needs_grad(xi), [xi, r0, n, m, w](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        Tensor gx = Tensor::zeros({m, w});
        std::copy(g.data.begin(), g.data.end(), gx.data.begin() + r0 * w);
        tp.add_to_grad(xi, gx);
    });
}

Expr concat_rows(const std::vector<Expr>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
    Tape& t = *parts[0].tape;
    std::size_t w = parts[0].val().cols();
    std::size_t m = 0;
    bool ng = false;
    for (const Expr& p : parts) {
        if (p.val().cols() != w) throw std::invalid_argument("concat_rows: width mismatch");
        m += p.val().rows();
        ng = ng || t.needs_grad(p.id);
    }
    Tensor out({m, w});
    std::size_t r = 0;
    std::vector<int> ids;
    std::vector<std::size_t> heights;
    for (const Expr& p : parts) {
        const Tensor& pv = p.val();
        std::copy(pv.data.begin(), pv.data.end(), out.data.begin() + r * w);
        r += pv.rows();
        ids.push_back(p.id);
        heights.push_back(pv.rows());
    }
    return make(t, std::move(out), ng, [ids, heights, w](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        std::size_t r = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            Tensor gp({heights[k], w});
            std::copy(g.data.begin() + r * w, g.data.begin() + (r + heights[k]) * w,
                      gp.data.begin());
            tp.add_to_grad(ids[k], gp);
            r += heights[k];
        }
    });
}

Expr concat_cols(const std::vector<Expr>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
    Tape& t = *parts[0].tape;
    std::size_t m = parts[0].val().rows();
    std::size_t w = 0;
    bool ng = false;
    for (const Expr& p : parts) {
        if (p.val().rows() != m) throw std::invalid_argument("concat_cols: height mismatch");
        w += p.val().cols();
        ng = ng || t.needs_grad(p.id);
    }
    Tensor out({m, w});
    std::vector<int> ids;
    std::vector<std::size_t> widths;
    std::size_t c = 0;
    for (const Expr& p : parts) {
        const Tensor& pv = p.val();
        std::size_t pw = pv.cols();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < pw; ++j) out.data[i * w + c + j] = pv.data[i * pw + j];
        c += pw;
        ids.push_back(p.id);
        widths.push_back(pw);
    }
    return make(t, std::move(out), ng, [ids, widths, m, w](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        std::size_t c = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            std::size_t pw = widths[k];
            Tensor gp({m, pw});
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < pw; ++j) gp.data[i * pw + j] = g.data[i * w + c + j];
            tp.add_to_grad(ids[k], gp);
            c += pw;
        }
    });
}

Expr reshape(Expr x, Shape s) {
    Tape& t = *x.tape;
    Tensor out = x.val().reshaped(s);
    int xi = x.id;
    Shape orig = x.val().shape;
    return make(t, std::move(out), t.needs_grad(xi), [xi, orig](Tape& tp, int self) {
        tp.add_to_grad(xi, tp.grad(self).reshaped(orig));
    });
}

Expr conv2d(Expr x, Expr w, Expr b, std::size_t stride) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    const Tensor& wv = w.val();
    const Tensor& bv = b.val();
    if (xv.ndim() != 3 || wv.ndim() != 4)
        throw std::invalid_argument("conv2d: expected image [H,W,C] and kernel [kh,kw,Cin,Cout]");
    std::size_t H = xv.shape[0], W = xv.shape[1], Ci = xv.shape[2];
    std::size_t kh = wv.shape[0], kw = wv.shape[1], Co = wv.shape[3];
    if (wv.shape[2] != Ci)
        throw std::invalid_argument("conv2d: channel mismatch " + shape_str(xv.shape) + " vs " +
                                    shape_str(wv.shape));
    if (H < kh || W < kw) throw std::invalid_argument("conv2d: kernel larger than input");
    if (bv.numel() != Co) throw std::invalid_argument("conv2d: bias length mismatch");
    std::size_t Ho = (H - kh) / stride + 1;
    std::size_t Wo = (W - kw) / stride + 1;
    Tensor out({Ho, Wo, Co});
    auto X = [&](std::size_t i, std::size_t j, std::size_t c) { return xv.data[(i * W + j) * Ci + c]; };
    auto Wk = [&](std::size_t ki, std::size_t kj, std::size_t ci, std::size_t co) {
        return wv.data[((ki * kw + kj) * Ci + ci) * Co + co];
    };
    for (std::size_t i = 0; i < Ho; ++i)
        for (std::size_t j = 0; j < Wo; ++j)
            for (std::size_t co = 0; co < Co; ++co) {
                double s = bv.data[co];
                for (std::size_t ki = 0; ki < kh; ++ki)
                    for (std::size_t kj = 0; kj < kw; ++kj)
                        for (std::size_t ci = 0; ci < Ci; ++ci)
                            s += X(i * stride + ki, j * stride + kj, ci) * Wk(ki, kj, ci, co);
                out.data[(i * Wo + j) * Co + co] = s;
            }
    bool ng = ng2(x, w) || t.needs_grad(b.id);
    int xi = x.id, wi = w.id, bi = b.id;
    return make(t, std::move(out), ng, [=](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        const Tensor& xv = tp.value(xi);
        const Tensor& wv = tp.value(wi);
        Tensor gx = Tensor::zeros(xv.shape);
        Tensor gw = Tensor::zeros(wv.shape);
        Tensor gb = Tensor::zeros(tp.value(bi).shape);
        for (std::size_t i = 0; i < Ho; ++i)
            for (std::size_t j = 0; j < Wo; ++j)
                for (std::size_t co = 0; co < Co; ++co) {
                    double go = g.data[(i * Wo + j) * Co + co];
                    gb.data[co] += go;
                    for (std::size_t ki = 0; ki < kh; ++ki)
                        for (std::size_t kj = 0; kj < kw; ++kj)
                            for (std::size_t ci = 0; ci < Ci; ++ci) {
                                std::size_t xo = ((i * stride + ki) * W + (j * stride + kj)) * Ci + ci;
                                std::size_t wo = ((ki * kw + kj) * Ci + ci) * Co + co;
                                gx.data[xo] += go * wv.data[wo];
                                gw.data[wo] += go * xv.data[xo];
                            }
                }
        tp.add_to_grad(xi, gx);
        tp.add_to_grad(wi, gw);
        tp.add_to_grad(bi, gb);
    });
}

Expr conv2d_transpose(Expr x, Expr w, Expr b, std::size_t stride, std::size_t out_pad_h,
                      std::size_t out_pad_w) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    const Tensor& wv = w.val();
    const Tensor& bv = b.val();
    if (xv.ndim() != 3 || wv.ndim() != 4)
        throw std::invalid_argument("conv2d_transpose: expected [H,W,C] and [kh,kw,Cin,Cout]");
    std::size_t H = xv.shape[0], W = xv.shape[1], Ci = xv.shape[2];
    std::size_t kh = wv.shape[0], kw = wv.shape[1], Co = wv.shape[3];
    if (wv.shape[2] != Ci)
        throw std::invalid_argument("conv2d_transpose: channel mismatch " + shape_str(xv.shape) +
                                    " vs " + shape_str(wv.shape));
    if (bv.numel() != Co) throw std::invalid_argument("conv2d_transpose: bias length mismatch");
    std::size_t Ho = (H - 1) * stride + kh + out_pad_h;
    std::size_t Wo = (W - 1) * stride + kw + out_pad_w;
    Tensor out({Ho, Wo, Co});
    for (std::size_t co = 0; co < Co; ++co)
        for (std::size_t i = 0; i < Ho; ++i)
            for (std::size_t j = 0; j < Wo; ++j) out.data[(i * Wo + j) * Co + co] = bv.data[co];
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j)
            for (std::size_t ci = 0; ci < Ci; ++ci) {
                double xval = xv.data[(i * W + j) * Ci + ci];
                for (std::size_t ki = 0; ki < kh; ++ki)
                    for (std::size_t kj = 0; kj < kw; ++kj)
                        for (std::size_t co = 0; co < Co; ++co)
                            out.data[((i * stride + ki) * Wo + (j * stride + kj)) * Co + co] +=
                                xval * wv.data[((ki * kw + kj) * Ci + ci) * Co + co];
            }
    bool ng = ng2(x, w) || t.needs_grad(b.id);
    int xi = x.id, wi = w.id, bi = b.id;
    return make(t, std::move(out), ng, [=](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        const Tensor& xv = tp.value(xi);
        const Tensor& wv = tp.value(wi);
        Tensor gx = Tensor::zeros(xv.shape);
        Tensor gw = Tensor::zeros(wv.shape);
        Tensor gb = Tensor::zeros(tp.value(bi).shape);
        for (std::size_t co = 0; co < Co; ++co)
            for (std::size_t i = 0; i < Ho; ++i)
                for (std::size_t j = 0; j < Wo; ++j) gb.data[co] += g.data[(i * Wo + j) * Co + co];
        for (std::size_t i = 0; i < H; ++i)
            for (std::size_t j = 0; j < W; ++j)
                for (std::size_t ci = 0; ci < Ci; ++ci) {
                    std::size_t xo = (i * W + j) * Ci + ci;
                    for (std::size_t ki = 0; ki < kh; ++ki)
                        for (std::size_t kj = 0; kj < kw; ++kj)
                            for (std::size_t co = 0; co < Co; ++co) {
                                std::size_t oo =
                                    ((i * stride + ki) * Wo + (j * stride + kj)) * Co + co;
                                std::size_t wo = ((ki * kw + kj) * Ci + ci) * Co + co;
                                gx.data[xo] += g.data[oo] * wv.data[wo];
                                gw.data[wo] += g.data[oo] * xv.data[xo];
                            }
                }
        tp.add_to_grad(xi, gx);
        tp.add_to_grad(wi, gw);
        tp.add_to_grad(bi, gb);
    });
}

Expr permute(Expr x, const std::vector<std::size_t>& src_index, Shape out_shape) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    if (numel_of(out_shape) != src_index.size() || src_index.size() != xv.numel())
        throw std::invalid_argument("permute: index map size mismatch");
    Tensor out(out_shape);
    for (std::size_t i = 0; i < src_index.size(); ++i) out.data[i] = xv.data[src_index[i]];
    int xi = x.id;
    std::vector<std::size_t> idx = src_index;
    Shape in_shape = xv.shape;
    return make(t, std::move(out), t.needs_grad(xi), [xi, idx, in_shape](Tape& tp, int self) {
        const Tensor& g = tp.grad(self);
        Tensor gx = Tensor::zeros(in_shape);
        for (std::size_t i = 0; i < idx.size(); ++i) gx.data[idx[i]] += g.data[i];
        tp.add_to_grad(xi, gx);
    });
}

Expr mse_loss(Expr x, const Tensor& target) {
    Tape& t = *x.tape;
    const Tensor& xv = x.val();
    if (!xv.same_shape(target))
        throw std::invalid_argument("mse_loss: shape mismatch " + shape_str(xv.shape) + " vs " +
                                    shape_str(target.shape));
    double loss = semcomm::mse(xv, target);
    int xi = x.id;
    Tensor tgt = target;
    return make(t, Tensor::scalar(loss), t.needs_grad(xi), [xi, tgt](Tape& tp, int self) {
        const Tensor& xv = tp.value(xi);
        double g = tp.grad(self).data[0];
        Tensor gx = Tensor::zeros(xv.shape);
        double c = 2.0 * g / double(xv.numel());
        for (std::size_t i = 0; i < xv.numel(); ++i) gx.data[i] = c * (xv.data[i] - tgt.data[i]);
        tp.add_to_grad(xi, gx);
    });
}

}  // namespace ad

double grad_check(const std::function<double(bool)>& f, const std::vector<Param*>& params,
                  double h, std::size_t max_coords_per_param) {
    double base = f(true);
    if (!std::isfinite(base)) throw std::runtime_error("grad_check: non-finite loss at base point");
    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (Param* p : params) analytic.push_back(p->grad);

    double worst = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Param* p = params[pi];
        std::size_t n = p->value.numel();
        std::size_t count = (max_coords_per_param == 0) ? n : std::min(n, max_coords_per_param);
        std::size_t step = n / count;
        if (step == 0) step = 1;
        for (std::size_t k = 0; k < count; ++k) {
            std::size_t i = k * step;
            double orig = p->value.data[i];
            p->value.data[i] = orig + h;
            double fp = f(false);
            p->value.data[i] = orig - h;
            double fm = f(false);
            p->value.data[i] = orig;
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw std::runtime_error("grad_check: non-finite loss during perturbation");
            double fd = (fp - fm) / (2.0 * h);
            double an = analytic[pi].data[i];
            double err = std::abs(an - fd) / (std::abs(an) + std::abs(fd) + 1e-8);
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace semcomm
