#pragma once

#include <stdexcept>
#include <vector>

namespace depthscope {

/// SGD with momentum and L2 weight decay, one velocity buffer per parameter
/// array:  v <- momentum*v + (grad + weight_decay*param);  param <- param - lr*v
template <typename T>
struct SgdOptimizer {
    T learning_rate;
    T momentum;
    T weight_decay;
    std::vector<std::vector<T>> velocity;  // indexed by parameter-array id

    SgdOptimizer(T lr, T mom, T wd) : learning_rate(lr), momentum(mom), weight_decay(wd) {}

    void step(size_t param_id, std::vector<T>& param, const std::vector<T>& grad) {
        if (param.size() != grad.size())
            throw std::invalid_argument("sgd_step: param/grad shape mismatch");
        if (param_id >= velocity.size()) velocity.resize(param_id + 1);
        auto& v = velocity[param_id];
        if (v.size() != param.size()) v.assign(param.size(), T(0));
        for (size_t i = 0; i < param.size(); ++i) {
            v[i] = momentum * v[i] + (grad[i] + weight_decay * param[i]);
            param[i] -= learning_rate * v[i];
        }
    }
};

}  // namespace depthscope
