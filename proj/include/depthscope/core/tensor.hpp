#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthscope {

/// Dense 4-D array in NCHW layout, row-major by (n, c, h, w).
/// `grad` is empty until a backward pass allocates it.
template <typename T>
struct Tensor {
    std::array<int, 4> shape{0, 0, 0, 0};
    std::vector<T> data;
    std::vector<T> grad;

    Tensor() = default;

    Tensor(int n, int c, int h, int w, T fill = T(0)) {
        if (n < 1 || c < 1 || h < 1 || w < 1)
            throw std::invalid_argument("Tensor: all dimensions must be >= 1, got " +
                                        shape_string({n, c, h, w}));
        shape = {n, c, h, w};
        data.assign(static_cast<size_t>(n) * c * h * w, fill);
    }

    static Tensor from_data(int n, int c, int h, int w, std::vector<T> values) {
        Tensor t(n, c, h, w);
        if (values.size() != t.data.size())
            throw std::invalid_argument("Tensor::from_data: got " + std::to_string(values.size()) +
                                        " values for shape " + t.shape_str());
        t.data = std::move(values);
        return t;
    }

    int n() const { return shape[0]; }
    int c() const { return shape[1]; }
    int h() const { return shape[2]; }
    int w() const { return shape[3]; }

    size_t size() const { return data.size(); }

    size_t index(int n_, int c_, int h_, int w_) const {
        return ((static_cast<size_t>(n_) * shape[1] + c_) * shape[2] + h_) * shape[3] + w_;
    }

    T& at(int n_, int c_, int h_, int w_) { return data[index(n_, c_, h_, w_)]; }
    const T& at(int n_, int c_, int h_, int w_) const { return data[index(n_, c_, h_, w_)]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    }

    void zero_grad() {
        if (!grad.empty()) std::fill(grad.begin(), grad.end(), T(0));
    }

    /// Copy with converted scalar type (float <-> double), grad not carried over.
    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(shape[0], shape[1], shape[2], shape[3]);
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }

    std::string shape_str() const { return shape_string(shape); }

    static std::string shape_string(const std::array<int, 4>& s) {
        return "(" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," +
               std::to_string(s[2]) + "," + std::to_string(s[3]) + ")";
    }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace depthscope
