#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "depthscope/core/rng.hpp"
#include "depthscope/core/tensor.hpp"

namespace depthscope::ops {

enum class Mode { Train, Eval };

// ---------------------------------------------------------------------------
// Convolution (cross-correlation semantics, zero padding, dilation support)
// ---------------------------------------------------------------------------

template <typename T>
struct ConvParams {
    int out_c = 0, in_c = 0, kh = 0, kw = 0;
    int stride = 1, pad = 0, dilation = 1;
    std::vector<T> kernel;  // [out_c][in_c][kh][kw]
    std::vector<T> bias;    // empty means no bias term

    size_t kernel_size() const {
        return static_cast<size_t>(out_c) * in_c * kh * kw;
    }
    bool has_bias() const { return !bias.empty(); }

    void validate() const {
        if (out_c < 1 || in_c < 1 || kh < 1 || kw < 1)
            throw std::invalid_argument("ConvParams: non-positive kernel dims");
        if (stride < 1 || pad < 0 || dilation < 1)
            throw std::invalid_argument("ConvParams: invalid stride/pad/dilation");
        if (kernel.size() != kernel_size())
            throw std::invalid_argument("ConvParams: kernel array size mismatch");
        if (!bias.empty() && bias.size() != static_cast<size_t>(out_c))
            throw std::invalid_argument("ConvParams: bias array size mismatch");
    }
};

/// floor((in + 2p - d(k-1) - 1) / s) + 1
inline int conv_out_dim(int in, int k, int s, int p, int d) {
    int eff = d * (k - 1) + 1;
    int num = in + 2 * p - eff;
    if (num < 0) return 0;
    return num / s + 1;
}

namespace detail {

/// Unrolls one batch item into a [in_c*kh*kw] x [oh*ow] matrix, zero padding.
template <typename T>
void im2col(const T* x, int c, int h, int w, int kh, int kw, int s, int p, int d,
            int oh, int ow, T* col) {
    const size_t plane = static_cast<size_t>(oh) * ow;
    for (int ci = 0; ci < c; ++ci) {
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                T* dst = col + ((static_cast<size_t>(ci) * kh + ki) * kw + kj) * plane;
                const T* src = x + static_cast<size_t>(ci) * h * w;
                for (int oy = 0; oy < oh; ++oy) {
                    int iy = oy * s - p + ki * d;
                    T* drow = dst + static_cast<size_t>(oy) * ow;
                    if (iy < 0 || iy >= h) {
                        std::fill(drow, drow + ow, T(0));
                        continue;
                    }
                    const T* srow = src + static_cast<size_t>(iy) * w;
                    int ix0 = -p + kj * d;
                    if (s == 1) {
                        // contiguous copy with clipped ends
                        int ox_lo = std::max(0, -ix0);
                        int ox_hi = std::min(ow, w - ix0);
                        if (ox_lo > 0) std::fill(drow, drow + std::min(ox_lo, ow), T(0));
                        if (ox_hi > ox_lo)
                            std::copy(srow + ix0 + ox_lo, srow + ix0 + ox_hi, drow + ox_lo);
                        if (ox_hi < ow) std::fill(drow + std::max(ox_hi, 0), drow + ow, T(0));
                    } else {
                        for (int ox = 0; ox < ow; ++ox) {
                            int ix = ox * s + ix0;
                            drow[ox] = (ix >= 0 && ix < w) ? srow[ix] : T(0);
                        }
                    }
                }
            }
        }
    }
}

/// Scatter-adds a column matrix back into an image (transpose of im2col).
template <typename T>
void col2im_add(const T* col, int c, int h, int w, int kh, int kw, int s, int p, int d,
                int oh, int ow, T* x) {
    const size_t plane = static_cast<size_t>(oh) * ow;
    for (int ci = 0; ci < c; ++ci) {
        T* dst = x + static_cast<size_t>(ci) * h * w;
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                const T* src = col + ((static_cast<size_t>(ci) * kh + ki) * kw + kj) * plane;
                for (int oy = 0; oy < oh; ++oy) {
                    int iy = oy * s - p + ki * d;
                    if (iy < 0 || iy >= h) continue;
                    const T* srow = src + static_cast<size_t>(oy) * ow;
                    T* drow = dst + static_cast<size_t>(iy) * w;
                    int ix0 = -p + kj * d;
                    for (int ox = 0; ox < ow; ++ox) {
                        int ix = ox * s + ix0;
                        if (ix >= 0 && ix < w) drow[ix] += srow[ox];
                    }
                }
            }
        }
    }
}

}  // namespace detail

template <typename T>
void conv_check_input(const Tensor<T>& x, const ConvParams<T>& p, int& oh, int& ow) {
    p.validate();
    if (x.c() != p.in_c)
        throw std::invalid_argument("conv2d: input has " + std::to_string(x.c()) +
                                    " channels, kernel expects " + std::to_string(p.in_c));
    oh = conv_out_dim(x.h(), p.kh, p.stride, p.pad, p.dilation);
    ow = conv_out_dim(x.w(), p.kw, p.stride, p.pad, p.dilation);
    if (oh < 1 || ow < 1)
        throw std::invalid_argument("conv2d: non-positive output size for input " + x.shape_str());
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const ConvParams<T>& p) {
    int oh, ow;
    conv_check_input(x, p, oh, ow);
    const int krows = p.in_c * p.kh * p.kw;
    const size_t plane = static_cast<size_t>(oh) * ow;
    Tensor<T> out(x.n(), p.out_c, oh, ow);
    std::vector<T> col(static_cast<size_t>(krows) * plane);
    for (int n = 0; n < x.n(); ++n) {
        detail::im2col(x.data.data() + x.index(n, 0, 0, 0), x.c(), x.h(), x.w(), p.kh, p.kw,
                       p.stride, p.pad, p.dilation, oh, ow, col.data());
        T* outn = out.data.data() + out.index(n, 0, 0, 0);
#pragma omp parallel for schedule(static)
        for (int o = 0; o < p.out_c; ++o) {
            T* orow = outn + static_cast<size_t>(o) * plane;
            T b = p.has_bias() ? p.bias[o] : T(0);
            std::fill(orow, orow + plane, b);
            const T* wrow = p.kernel.data() + static_cast<size_t>(o) * krows;
            int k = 0;
            for (; k + 4 <= krows; k += 4) {
                const T a0 = wrow[k], a1 = wrow[k + 1], a2 = wrow[k + 2], a3 = wrow[k + 3];
                const T* c0 = col.data() + static_cast<size_t>(k) * plane;
                const T* c1 = c0 + plane;
                const T* c2 = c1 + plane;
                const T* c3 = c2 + plane;
                for (size_t j = 0; j < plane; ++j)
                    orow[j] += a0 * c0[j] + a1 * c1[j] + a2 * c2[j] + a3 * c3[j];
            }
            for (; k < krows; ++k) {
                const T a = wrow[k];
                const T* crow = col.data() + static_cast<size_t>(k) * plane;
                for (size_t j = 0; j < plane; ++j) orow[j] += a * crow[j];
            }
        }
    }
    return out;
}

template <typename T>
struct ConvGrads {
    Tensor<T> input;
    std::vector<T> kernel;
    std::vector<T> bias;
};

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const ConvParams<T>& p, const Tensor<T>& gout) {
    int oh, ow;
    conv_check_input(x, p, oh, ow);
    if (gout.n() != x.n() || gout.c() != p.out_c || gout.h() != oh || gout.w() != ow)
        throw std::invalid_argument("conv2d_backward: grad_out shape " + gout.shape_str() +
                                    " does not match forward output");
    const int krows = p.in_c * p.kh * p.kw;
    const size_t plane = static_cast<size_t>(oh) * ow;

    ConvGrads<T> g;
    g.input = Tensor<T>(x.n(), x.c(), x.h(), x.w());
    g.kernel.assign(p.kernel_size(), T(0));
    g.bias.assign(p.out_c, T(0));

    std::vector<T> col(static_cast<size_t>(krows) * plane);
    std::vector<T> colg(static_cast<size_t>(krows) * plane);
    for (int n = 0; n < x.n(); ++n) {
        detail::im2col(x.data.data() + x.index(n, 0, 0, 0), x.c(), x.h(), x.w(), p.kh, p.kw,
                       p.stride, p.pad, p.dilation, oh, ow, col.data());
        const T* gon = gout.data.data() + gout.index(n, 0, 0, 0);

        for (int o = 0; o < p.out_c; ++o) {
            const T* grow = gon + static_cast<size_t>(o) * plane;
            T s = T(0);
            for (size_t j = 0; j < plane; ++j) s += grow[j];
            g.bias[o] += s;
        }

#pragma omp parallel for collapse(2) schedule(static)
        for (int o = 0; o < p.out_c; ++o) {
            for (int k = 0; k < krows; ++k) {
                const T* grow = gon + static_cast<size_t>(o) * plane;
                const T* crow = col.data() + static_cast<size_t>(k) * plane;
                T s = T(0);
#pragma omp simd reduction(+ : s)
                for (size_t j = 0; j < plane; ++j) s += grow[j] * crow[j];
                g.kernel[static_cast<size_t>(o) * krows + k] += s;
            }
        }

#pragma omp parallel for schedule(static)
        for (int k = 0; k < krows; ++k) {
            T* crow = colg.data() + static_cast<size_t>(k) * plane;
            std::fill(crow, crow + plane, T(0));
            int o = 0;
            for (; o + 4 <= p.out_c; o += 4) {
                const T a0 = p.kernel[static_cast<size_t>(o) * krows + k];
                const T a1 = p.kernel[static_cast<size_t>(o + 1) * krows + k];
                const T a2 = p.kernel[static_cast<size_t>(o + 2) * krows + k];
                const T a3 = p.kernel[static_cast<size_t>(o + 3) * krows + k];
                const T* g0 = gon + static_cast<size_t>(o) * plane;
                const T* g1 = g0 + plane;
                const T* g2 = g1 + plane;
                const T* g3 = g2 + plane;
                for (size_t j = 0; j < plane; ++j)
                    crow[j] += a0 * g0[j] + a1 * g1[j] + a2 * g2[j] + a3 * g3[j];
            }
            for (; o < p.out_c; ++o) {
                const T a = p.kernel[static_cast<size_t>(o) * krows + k];
                const T* grow = gon + static_cast<size_t>(o) * plane;
                for (size_t j = 0; j < plane; ++j) crow[j] += a * grow[j];
            }
        }
        detail::col2im_add(colg.data(), x.c(), x.h(), x.w(), p.kh, p.kw, p.stride, p.pad,
                           p.dilation, oh, ow, g.input.data.data() + g.input.index(n, 0, 0, 0));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Max pooling (argmax recorded for backward routing; padding is -inf)
// ---------------------------------------------------------------------------

template <typename T>
struct PoolResult {
    Tensor<T> out;
    std::vector<int64_t> argmax;  // linear index into the input tensor
};

template <typename T>
PoolResult<T> maxpool2d(const Tensor<T>& x, int k, int s, int pad = 0) {
    if (k < 1 || s < 1 || pad < 0 || pad >= k)
        throw std::invalid_argument("maxpool2d: invalid window/stride/pad");
    int oh = conv_out_dim(x.h(), k, s, pad, 1);
    int ow = conv_out_dim(x.w(), k, s, pad, 1);
    if (oh < 1 || ow < 1)
        throw std::invalid_argument("maxpool2d: window larger than input " + x.shape_str());
    PoolResult<T> r;
    r.out = Tensor<T>(x.n(), x.c(), oh, ow);
    r.argmax.assign(r.out.size(), -1);
    size_t oi = 0;
    for (int n = 0; n < x.n(); ++n)
        for (int c = 0; c < x.c(); ++c)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    T best = -std::numeric_limits<T>::infinity();
                    int64_t best_idx = -1;
                    for (int ki = 0; ki < k; ++ki) {
                        int iy = oy * s - pad + ki;
                        if (iy < 0 || iy >= x.h()) continue;
                        for (int kj = 0; kj < k; ++kj) {
                            int ix = ox * s - pad + kj;
                            if (ix < 0 || ix >= x.w()) continue;
                            T v = x.at(n, c, iy, ix);
                            if (v > best) {
                                best = v;
                                best_idx = static_cast<int64_t>(x.index(n, c, iy, ix));
                            }
                        }
                    }
                    r.out.data[oi] = best;
                    r.argmax[oi] = best_idx;
                }
    return r;
}

template <typename T>
Tensor<T> maxpool2d_backward(const std::vector<int64_t>& argmax, const Tensor<T>& gout,
                             const std::array<int, 4>& in_shape) {
    Tensor<T> gx(in_shape[0], in_shape[1], in_shape[2], in_shape[3]);
    if (argmax.size() != gout.size())
        throw std::invalid_argument("maxpool2d_backward: argmax/grad size mismatch");
    for (size_t i = 0; i < gout.size(); ++i)
        if (argmax[i] >= 0) gx.data[static_cast<size_t>(argmax[i])] += gout.data[i];
    return gx;
}

// ---------------------------------------------------------------------------
// Nearest-neighbor upsampling
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, int fh, int fw) {
    if (fh < 1 || fw < 1) throw std::invalid_argument("upsample_nearest: factor < 1");
    Tensor<T> out(x.n(), x.c(), x.h() * fh, x.w() * fw);
    for (int n = 0; n < x.n(); ++n)
        for (int c = 0; c < x.c(); ++c)
            for (int oy = 0; oy < out.h(); ++oy) {
                const T* srow = &x.at(n, c, oy / fh, 0);
                T* drow = &out.at(n, c, oy, 0);
                for (int ox = 0; ox < out.w(); ++ox) drow[ox] = srow[ox / fw];
            }
    return out;
}

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, int factor) {
    return upsample_nearest(x, factor, factor);
}

/// Each input pixel receives the sum of its fh*fw replicated output grads.
template <typename T>
Tensor<T> upsample_nearest_backward(const Tensor<T>& gout, int fh, int fw) {
    if (gout.h() % fh != 0 || gout.w() % fw != 0)
        throw std::invalid_argument("upsample_nearest_backward: size not divisible by factor");
    Tensor<T> gx(gout.n(), gout.c(), gout.h() / fh, gout.w() / fw);
    for (int n = 0; n < gout.n(); ++n)
        for (int c = 0; c < gout.c(); ++c)
            for (int oy = 0; oy < gout.h(); ++oy) {
                T* drow = &gx.at(n, c, oy / fh, 0);
                const T* srow = &gout.at(n, c, oy, 0);
                for (int ox = 0; ox < gout.w(); ++ox) drow[ox / fw] += srow[ox];
            }
    return gx;
}

// ---------------------------------------------------------------------------
// Batch normalization
// ---------------------------------------------------------------------------

template <typename T>
struct BnCache {
    std::vector<T> mean;    // statistics the forward pass normalized with
    std::vector<T> invstd;
};

/// Train mode normalizes by batch statistics; eval mode by running statistics.
/// Running stats are updated only when `update_running` is set (the gradient
/// checker re-runs forwards and must not drift them).
template <typename T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, const std::vector<T>& gamma,
                            const std::vector<T>& beta, std::vector<T>& running_mean,
                            std::vector<T>& running_var, T eps, T momentum, Mode mode,
                            bool update_running, BnCache<T>* cache = nullptr) {
    const size_t C = static_cast<size_t>(x.c());
    if (gamma.size() != C || beta.size() != C || running_mean.size() != C ||
        running_var.size() != C)
        throw std::invalid_argument("batchnorm: per-channel array length != C");
    if (x.n() < 1) throw std::invalid_argument("batchnorm: zero-size batch");

    const size_t m = static_cast<size_t>(x.n()) * x.h() * x.w();
    std::vector<T> mean(C), invstd(C);
    if (mode == Mode::Train) {
        for (size_t c = 0; c < C; ++c) {
            double sum = 0.0, sq = 0.0;
            for (int n = 0; n < x.n(); ++n) {
                const T* p = &x.at(n, static_cast<int>(c), 0, 0);
                for (size_t i = 0; i < static_cast<size_t>(x.h()) * x.w(); ++i) {
                    sum += p[i];
                    sq += static_cast<double>(p[i]) * p[i];
                }
            }
            double mu = sum / static_cast<double>(m);
            double var = sq / static_cast<double>(m) - mu * mu;
            if (var < 0) var = 0;  // numeric guard
            mean[c] = static_cast<T>(mu);
            invstd[c] = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(eps)));
            if (update_running) {
                running_mean[c] = (T(1) - momentum) * running_mean[c] + momentum * static_cast<T>(mu);
                running_var[c] = (T(1) - momentum) * running_var[c] + momentum * static_cast<T>(var);
            }
        }
    } else {
        for (size_t c = 0; c < C; ++c) {
            mean[c] = running_mean[c];
            invstd[c] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var[c]) +
                                                       static_cast<double>(eps)));
        }
    }
    if (cache) {
        cache->mean = mean;
        cache->invstd = invstd;
    }

    Tensor<T> out(x.n(), x.c(), x.h(), x.w());
    for (int n = 0; n < x.n(); ++n)
        for (int c = 0; c < x.c(); ++c) {
            const T mu = mean[c], is = invstd[c], g = gamma[c], b = beta[c];
            const T* src = &x.at(n, c, 0, 0);
            T* dst = &out.at(n, c, 0, 0);
            for (size_t i = 0; i < static_cast<size_t>(x.h()) * x.w(); ++i)
                dst[i] = g * ((src[i] - mu) * is) + b;
        }
    return out;
}

template <typename T>
struct BnGrads {
    Tensor<T> input;
    std::vector<T> gamma;
    std::vector<T> beta;
};

template <typename T>
BnGrads<T> batchnorm_backward(const Tensor<T>& x, const std::vector<T>& gamma,
                              const BnCache<T>& cache, const Tensor<T>& gout, Mode mode) {
    if (!x.same_shape(gout))
        throw std::invalid_argument("batchnorm_backward: shape mismatch");
    const size_t C = static_cast<size_t>(x.c());
    const size_t m = static_cast<size_t>(x.n()) * x.h() * x.w();
    BnGrads<T> g;
    g.input = Tensor<T>(x.n(), x.c(), x.h(), x.w());
    g.gamma.assign(C, T(0));
    g.beta.assign(C, T(0));

    for (size_t c = 0; c < C; ++c) {
        const T mu = cache.mean[c], is = cache.invstd[c], ga = gamma[c];
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int n = 0; n < x.n(); ++n) {
            const T* xs = &x.at(n, static_cast<int>(c), 0, 0);
            const T* gs = &gout.at(n, static_cast<int>(c), 0, 0);
            for (size_t i = 0; i < static_cast<size_t>(x.h()) * x.w(); ++i) {
                sum_dy += gs[i];
                sum_dy_xhat += static_cast<double>(gs[i]) * ((xs[i] - mu) * is);
            }
        }
        g.beta[c] = static_cast<T>(sum_dy);
        g.gamma[c] = static_cast<T>(sum_dy_xhat);

        if (mode == Mode::Train) {
            // dx = (gamma * invstd / m) * (m*dy - sum(dy) - xhat * sum(dy*xhat))
            const T k = ga * is / static_cast<T>(m);
            for (int n = 0; n < x.n(); ++n) {
                const T* xs = &x.at(n, static_cast<int>(c), 0, 0);
                const T* gs = &gout.at(n, static_cast<int>(c), 0, 0);
                T* ds = &g.input.at(n, static_cast<int>(c), 0, 0);
                for (size_t i = 0; i < static_cast<size_t>(x.h()) * x.w(); ++i) {
                    T xhat = (xs[i] - mu) * is;
                    ds[i] = k * (static_cast<T>(m) * gs[i] - static_cast<T>(sum_dy) -
                                 xhat * static_cast<T>(sum_dy_xhat));
                }
            }
        } else {
            const T k = ga * is;
            for (int n = 0; n < x.n(); ++n) {
                const T* gs = &gout.at(n, static_cast<int>(c), 0, 0);
                T* ds = &g.input.at(n, static_cast<int>(c), 0, 0);
                for (size_t i = 0; i < static_cast<size_t>(x.h()) * x.w(); ++i)
                    ds[i] = k * gs[i];
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

/// Randomized leaky rectifier. Train mode samples a per-element negative slope
/// uniformly from [lower, upper); eval mode uses the interval midpoint. The
/// multiplier actually applied is recorded in `slopes` for the backward pass.
template <typename T>
Tensor<T> rrelu_forward(const Tensor<T>& x, T lower, T upper, Mode mode, RngStream* rng,
                        std::vector<T>* slopes = nullptr) {
    if (!(T(0) < lower && lower < upper && upper < T(1)))
        throw std::invalid_argument("rrelu: bounds must satisfy 0 < lower < upper < 1");
    if (mode == Mode::Train && rng == nullptr)
        throw std::invalid_argument("rrelu: train mode requires an RNG stream");
    Tensor<T> out(x.n(), x.c(), x.h(), x.w());
    if (slopes) slopes->assign(x.size(), T(1));
    const T mid = (lower + upper) / T(2);
    for (size_t i = 0; i < x.size(); ++i) {
        T v = x.data[i];
        if (v >= T(0)) {
            out.data[i] = v;
        } else {
            T s = (mode == Mode::Train)
                      ? static_cast<T>(rng->uniform(static_cast<double>(lower),
                                                    static_cast<double>(upper)))
                      : mid;
            out.data[i] = s * v;
            if (slopes) (*slopes)[i] = s;
        }
    }
    return out;
}

template <typename T>
Tensor<T> rrelu_backward(const std::vector<T>& slopes, const Tensor<T>& gout) {
    if (slopes.size() != gout.size())
        throw std::invalid_argument("rrelu_backward: slope cache size mismatch");
    Tensor<T> gx(gout.n(), gout.c(), gout.h(), gout.w());
    for (size_t i = 0; i < gout.size(); ++i) gx.data[i] = slopes[i] * gout.data[i];
    return gx;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    Tensor<T> out(x.n(), x.c(), x.h(), x.w());
    for (size_t i = 0; i < x.size(); ++i) out.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
    return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& gout) {
    if (!x.same_shape(gout)) throw std::invalid_argument("relu_backward: shape mismatch");
    Tensor<T> gx(x.n(), x.c(), x.h(), x.w());
    for (size_t i = 0; i < x.size(); ++i) gx.data[i] = x.data[i] > T(0) ? gout.data[i] : T(0);
    return gx;
}

// ---------------------------------------------------------------------------
// Channel concatenation
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> concat_channels(std::span<const Tensor<T>* const> inputs) {
    if (inputs.empty()) throw std::invalid_argument("concat_channels: no inputs");
    int n = inputs[0]->n(), h = inputs[0]->h(), w = inputs[0]->w();
    int c_total = 0;
    for (const Tensor<T>* t : inputs) {
        if (t->n() != n || t->h() != h || t->w() != w)
            throw std::invalid_argument("concat_channels: spatial/batch mismatch " +
                                        t->shape_str());
        c_total += t->c();
    }
    Tensor<T> out(n, c_total, h, w);
    for (int ni = 0; ni < n; ++ni) {
        int c_off = 0;
        for (const Tensor<T>* t : inputs) {
            std::copy(&t->at(ni, 0, 0, 0), &t->at(ni, 0, 0, 0) + static_cast<size_t>(t->c()) * h * w,
                      &out.at(ni, c_off, 0, 0));
            c_off += t->c();
        }
    }
    return out;
}

template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& inputs) {
    std::vector<const Tensor<T>*> ptrs;
    for (const auto& t : inputs) ptrs.push_back(&t);
    return concat_channels<T>(std::span<const Tensor<T>* const>(ptrs.data(), ptrs.size()));
}

/// Exact split of the incoming gradient along the channel axis.
template <typename T>
std::vector<Tensor<T>> concat_channels_backward(const Tensor<T>& gout,
                                                const std::vector<std::array<int, 4>>& in_shapes) {
    std::vector<Tensor<T>> grads;
    grads.reserve(in_shapes.size());
    for (auto s : in_shapes) grads.emplace_back(s[0], s[1], s[2], s[3]);
    for (int ni = 0; ni < gout.n(); ++ni) {
        int c_off = 0;
        for (auto& g : grads) {
            std::copy(&gout.at(ni, c_off, 0, 0),
                      &gout.at(ni, c_off, 0, 0) + static_cast<size_t>(g.c()) * g.h() * g.w(),
                      &g.at(ni, 0, 0, 0));
            c_off += g.c();
        }
    }
    return grads;
}

// ---------------------------------------------------------------------------
// Global average pooling (ASPP image-pooling branch)
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    Tensor<T> out(x.n(), x.c(), 1, 1);
    const size_t hw = static_cast<size_t>(x.h()) * x.w();
    for (int n = 0; n < x.n(); ++n)
        for (int c = 0; c < x.c(); ++c) {
            double s = 0.0;
            const T* p = &x.at(n, c, 0, 0);
            for (size_t i = 0; i < hw; ++i) s += p[i];
            out.at(n, c, 0, 0) = static_cast<T>(s / static_cast<double>(hw));
        }
    return out;
}

template <typename T>
Tensor<T> global_avg_pool_backward(const Tensor<T>& gout, const std::array<int, 4>& in_shape) {
    Tensor<T> gx(in_shape[0], in_shape[1], in_shape[2], in_shape[3]);
    const size_t hw = static_cast<size_t>(in_shape[2]) * in_shape[3];
    for (int n = 0; n < gx.n(); ++n)
        for (int c = 0; c < gx.c(); ++c) {
            T v = gout.at(n, c, 0, 0) / static_cast<T>(hw);
            T* p = &gx.at(n, c, 0, 0);
            for (size_t i = 0; i < hw; ++i) p[i] = v;
        }
    return gx;
}

// ---------------------------------------------------------------------------
// Masked L2 loss
// ---------------------------------------------------------------------------

/// Mean of squared differences over masked pixels. When `grad_pred` is given
/// it receives 2*(pred-target)/count on masked pixels and 0 elsewhere.
template <typename T>
T l2_loss(const Tensor<T>& pred, const Tensor<T>& target, const Tensor<T>& mask,
          Tensor<T>* grad_pred = nullptr) {
    if (!pred.same_shape(target) || !pred.same_shape(mask))
        throw std::invalid_argument("l2_loss: shape mismatch");
    size_t count = 0;
    double acc = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (mask.data[i] > T(0.5)) {
            double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
            acc += d * d;
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("l2_loss: empty mask");
    if (grad_pred) {
        *grad_pred = Tensor<T>(pred.n(), pred.c(), pred.h(), pred.w());
        const T scale = T(2) / static_cast<T>(count);
        for (size_t i = 0; i < pred.size(); ++i)
            if (mask.data[i] > T(0.5))
                grad_pred->data[i] = scale * (pred.data[i] - target.data[i]);
    }
    return static_cast<T>(acc / static_cast<double>(count));
}

}  // namespace depthscope::ops
