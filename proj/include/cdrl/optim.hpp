#pragma once

#include <cmath>
#include <vector>

#include "cdrl/nn.hpp"
#include "cdrl/tensor.hpp"

namespace cdrl {

// Adaptive-moment optimizer over the trainable parameter set only.
template <class T>
class Adam {
  public:
    double learning_rate = 5e-7;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit Adam(std::vector<Param<T>*> all_params, double lr = 5e-7) : learning_rate(lr) {
        for (auto* p : all_params)
            if (p->trainable) params_.push_back(p);
        for (auto* p : params_) {
            m_.emplace_back(p->value.shape);
            v_.emplace_back(p->value.shape);
        }
    }

    long step_count() const { return t_; }
    const std::vector<Param<T>*>& trainable() const { return params_; }

    void zero_grad() {
        for (auto* p : params_) p->zero_grad();
    }

    // One update. Rejects non-finite gradients before mutating anything.
    void step() {
        for (auto* p : params_)
            if (!p->grad.all_finite())
                throw NumericError("optimizer_step: non-finite gradient in " + p->name);
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            auto& val = params_[i]->value;
            auto& g = params_[i]->grad;
            auto& m = m_[i];
            auto& v = v_[i];
            for (std::size_t j = 0; j < val.numel(); ++j) {
                const double gj = static_cast<double>(g[j]);
                const double mj = beta1 * static_cast<double>(m[j]) + (1.0 - beta1) * gj;
                const double vj = beta2 * static_cast<double>(v[j]) + (1.0 - beta2) * gj * gj;
                m[j] = static_cast<T>(mj);
                v[j] = static_cast<T>(vj);
                val[j] -= static_cast<T>(learning_rate * (mj / bc1) /
                                         (std::sqrt(vj / bc2) + epsilon));
            }
        }
    }

  private:
    std::vector<Param<T>*> params_;
    std::vector<Tensor<T>> m_, v_;
    long t_ = 0;
};

template <class T>
double global_grad_norm(const std::vector<Param<T>*>& params) {
    double ss = 0;
    for (auto* p : params)
        if (p->trainable)
            for (T g : p->grad.data) ss += static_cast<double>(g) * static_cast<double>(g);
    return std::sqrt(ss);
}

template <class T>
void clip_grad_norm(const std::vector<Param<T>*>& params, double max_norm) {
    const double norm = global_grad_norm(params);
    if (norm <= max_norm || norm == 0) return;
    const T scale = static_cast<T>(max_norm / norm);
    for (auto* p : params)
        if (p->trainable)
            for (T& g : p->grad.data) g *= scale;
}

}  // namespace cdrl
