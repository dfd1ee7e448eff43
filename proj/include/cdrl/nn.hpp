#pragma once

#include <Eigen/Core>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cdrl/tensor.hpp"

namespace cdrl {

// Named parameter with a matching gradient buffer. Fixed structures
// (sparse projections, masks, gate hyperplanes) carry trainable=false
// and their gradient buffers stay zero through backward passes.
template <class T>
struct Param {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    bool trainable = true;

    Param() = default;
    Param(std::string n, std::vector<int> shape, bool train = true)
        : name(std::move(n)), value(shape), grad(shape), trainable(train) {}

    void zero_grad() { grad.zero(); }
};

template <class T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class T>
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Fan-in-scaled uniform init.
template <class T>
void init_uniform_fan_in(Tensor<T>& t, int fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : t.data) v = static_cast<T>(dist(rng));
}

// Fully connected layer: y = xW + b, x is [B, in], W is [in, out].
template <class T>
struct Dense {
    Param<T> W, b;
    Tensor<T> x_cache;

    Dense() = default;
    Dense(const std::string& name, int in, int out, std::mt19937_64& rng)
        : W(name + ".W", {in, out}), b(name + ".b", {out}) {
        init_uniform_fan_in(W.value, in, rng);
        init_uniform_fan_in(b.value, in, rng);
    }

    int in_dim() const { return W.value.dim(0); }
    int out_dim() const { return W.value.dim(1); }

    Tensor<T> forward(const Tensor<T>& x) {
        require_rank(x, 2, "dense_forward");
        if (x.dim(1) != in_dim())
            throw ShapeError("dense_forward: input " + x.shape_str() + " vs weights " +
                             W.value.shape_str());
        x_cache = x;
        const int B = x.dim(0);
        Tensor<T> y({B, out_dim()});
        if (B == 0) return y;
        ConstMatMap<T> xm(x.ptr(), B, in_dim());
        ConstMatMap<T> wm(W.value.ptr(), in_dim(), out_dim());
        MatMap<T> ym(y.ptr(), B, out_dim());
        ym.noalias() = xm * wm;
        ym.rowwise() += ConstMatMap<T>(b.value.ptr(), 1, out_dim()).row(0);
        return y;
    }

    // Accumulates dW/db, returns dx.
    Tensor<T> backward(const Tensor<T>& dy) {
        if (x_cache.shape.size() != 2)
            throw UsageError("dense backward: backward before forward");
        const int B = dy.dim(0);
        if (dy.dim(1) != out_dim() || x_cache.dim(0) != B)
            throw UsageError("dense backward: no matching forward pass recorded");
        Tensor<T> dx({B, in_dim()});
        if (B == 0) return dx;
        ConstMatMap<T> dym(dy.ptr(), B, out_dim());
        ConstMatMap<T> xm(x_cache.ptr(), B, in_dim());
        ConstMatMap<T> wm(W.value.ptr(), in_dim(), out_dim());
        MatMap<T>(W.grad.ptr(), in_dim(), out_dim()).noalias() += xm.transpose() * dym;
        MatMap<T>(b.grad.ptr(), 1, out_dim()).row(0) += dym.colwise().sum();
        MatMap<T>(dx.ptr(), B, in_dim()).noalias() = dym * wm.transpose();
        return dx;
    }
};

// Valid cross-correlation, square kernel, no padding.
// Input [B, C, H, W] -> output [B, outC, oh, ow], oh = (H-k)/stride + 1.
template <class T>
struct Conv2d {
    Param<T> W, b;  // W: [outC, inC, k, k]
    int stride = 1;
    Tensor<T> x_cache;

    Conv2d() = default;
    Conv2d(const std::string& name, int in_c, int out_c, int k, int s, std::mt19937_64& rng)
        : W(name + ".W", {out_c, in_c, k, k}), b(name + ".b", {out_c}), stride(s) {
        init_uniform_fan_in(W.value, in_c * k * k, rng);
        init_uniform_fan_in(b.value, in_c * k * k, rng);
    }

    int out_c() const { return W.value.dim(0); }
    int in_c() const { return W.value.dim(1); }
    int k() const { return W.value.dim(2); }

    static int out_size(int in, int k, int stride) { return (in - k) / stride + 1; }

    Tensor<T> forward(const Tensor<T>& x) {
        require_rank(x, 4, "conv_forward");
        const int B = x.dim(0), C = x.dim(1), H = x.dim(2), Win = x.dim(3);
        if (C != in_c())
            throw ShapeError("conv_forward: channels " + x.shape_str() + " vs kernel " +
                             W.value.shape_str());
        if (H < k() || Win < k())
            throw ShapeError("conv_forward: kernel " + W.value.shape_str() +
                             " larger than input " + x.shape_str());
        x_cache = x;
        const int oh = out_size(H, k(), stride), ow = out_size(Win, k(), stride);
        const int patch = C * k() * k();
        Tensor<T> y({B, out_c(), oh, ow});
        Tensor<T> col({patch, oh * ow});
        ConstMatMap<T> wm(W.value.ptr(), out_c(), patch);
        for (int bidx = 0; bidx < B; ++bidx) {
            im2col(x.ptr() + static_cast<std::size_t>(bidx) * C * H * Win, C, H, Win, oh, ow,
                   col.ptr());
            MatMap<T> ym(y.ptr() + static_cast<std::size_t>(bidx) * out_c() * oh * ow, out_c(),
                         oh * ow);
            ym.noalias() = wm * ConstMatMap<T>(col.ptr(), patch, oh * ow);
            for (int oc = 0; oc < out_c(); ++oc) ym.row(oc).array() += b.value[oc];
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        if (x_cache.numel() == 0) throw UsageError("conv backward: backward before forward");
        const int B = x_cache.dim(0), C = x_cache.dim(1), H = x_cache.dim(2),
                  Win = x_cache.dim(3);
        const int oh = out_size(H, k(), stride), ow = out_size(Win, k(), stride);
        const int patch = C * k() * k();
        Tensor<T> dx(x_cache.shape);
        Tensor<T> col({patch, oh * ow});
        Tensor<T> dcol({patch, oh * ow});
        ConstMatMap<T> wm(W.value.ptr(), out_c(), patch);
        MatMap<T> dwm(W.grad.ptr(), out_c(), patch);
        for (int bidx = 0; bidx < B; ++bidx) {
            ConstMatMap<T> dym(dy.ptr() + static_cast<std::size_t>(bidx) * out_c() * oh * ow,
                               out_c(), oh * ow);
            im2col(x_cache.ptr() + static_cast<std::size_t>(bidx) * C * H * Win, C, H, Win, oh,
                   ow, col.ptr());
            dwm.noalias() += dym * ConstMatMap<T>(col.ptr(), patch, oh * ow).transpose();
            for (int oc = 0; oc < out_c(); ++oc) b.grad[oc] += dym.row(oc).sum();
            MatMap<T>(dcol.ptr(), patch, oh * ow).noalias() = wm.transpose() * dym;
            col2im(dcol.ptr(), C, H, Win, oh, ow,
                   dx.ptr() + static_cast<std::size_t>(bidx) * C * H * Win);
        }
        return dx;
    }

  private:
    void im2col(const T* x, int C, int H, int Win, int oh, int ow, T* col) const {
        const int kk = k();
        for (int c = 0; c < C; ++c)
            for (int ki = 0; ki < kk; ++ki)
                for (int kj = 0; kj < kk; ++kj) {
                    T* row = col + (static_cast<std::size_t>(c) * kk * kk + ki * kk + kj) *
                                       (static_cast<std::size_t>(oh) * ow);
                    for (int oi = 0; oi < oh; ++oi) {
                        const T* src = x + (static_cast<std::size_t>(c) * H +
                                            (oi * stride + ki)) * Win + kj;
                        for (int oj = 0; oj < ow; ++oj) row[oi * ow + oj] = src[oj * stride];
                    }
                }
    }

    void col2im(const T* col, int C, int H, int Win, int oh, int ow, T* dx) const {
        const int kk = k();
        for (int c = 0; c < C; ++c)
            for (int ki = 0; ki < kk; ++ki)
                for (int kj = 0; kj < kk; ++kj) {
                    const T* row = col + (static_cast<std::size_t>(c) * kk * kk + ki * kk + kj) *
                                             (static_cast<std::size_t>(oh) * ow);
                    for (int oi = 0; oi < oh; ++oi) {
                        T* dst = dx + (static_cast<std::size_t>(c) * H + (oi * stride + ki)) *
                                          Win + kj;
                        for (int oj = 0; oj < ow; ++oj) dst[oj * stride] += row[oi * ow + oj];
                    }
                }
    }
};

template <class T>
struct ReLU {
    Tensor<T> mask;

    Tensor<T> forward(const Tensor<T>& x) {
        mask = Tensor<T>(x.shape);
        Tensor<T> y(x.shape);
        for (std::size_t i = 0; i < x.numel(); ++i) {
            const bool pos = x[i] > T(0);
            mask[i] = pos ? T(1) : T(0);
            y[i] = pos ? x[i] : T(0);
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) const {
        if (mask.numel() != dy.numel()) throw UsageError("relu backward: no forward recorded");
        Tensor<T> dx(dy.shape);
        for (std::size_t i = 0; i < dy.numel(); ++i) dx[i] = dy[i] * mask[i];
        return dx;
    }
};

}  // namespace cdrl
