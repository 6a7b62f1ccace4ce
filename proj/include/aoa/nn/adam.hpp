#pragma once

#include <cmath>
#include <vector>

#include "aoa/nn/layers.hpp"
#include "aoa/parallel.hpp"

namespace aoa::nn {

// Adam with inverse-time learning-rate decay: lr_t = lr / (1 + decay * t).
template <typename T>
class Adam {
public:
    Adam(std::vector<ParamRef<T>> params, double learning_rate = 1e-3, double decay = 1e-6,
         double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : params_(std::move(params)), lr_(learning_rate), decay_(decay), beta1_(beta1),
          beta2_(beta2), eps_(eps) {
        for (const ParamRef<T>& p : params_) {
            m_.emplace_back(p.value->size(), 0.0);
            v_.emplace_back(p.value->size(), 0.0);
        }
    }

    void step() {
        ++t_;
        const double lr_t = lr_ / (1.0 + decay_ * static_cast<double>(t_));
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t k = 0; k < params_.size(); ++k) {
            std::vector<T>& value = *params_[k].value;
            const std::vector<T>& grad = *params_[k].grad;
            std::vector<double>& m = m_[k];
            std::vector<double>& v = v_[k];
            par::parallel_for(static_cast<std::int64_t>(value.size()), [&](std::int64_t i) {
                const double g = static_cast<double>(grad[static_cast<std::size_t>(i)]);
                double& mi = m[static_cast<std::size_t>(i)];
                double& vi = v[static_cast<std::size_t>(i)];
                mi = beta1_ * mi + (1.0 - beta1_) * g;
                vi = beta2_ * vi + (1.0 - beta2_) * g * g;
                const double mhat = mi / bc1;
                const double vhat = vi / bc2;
                value[static_cast<std::size_t>(i)] -=
                    static_cast<T>(lr_t * mhat / (std::sqrt(vhat) + eps_));
            });
        }
    }

    std::int64_t step_count() const { return t_; }

private:
    std::vector<ParamRef<T>> params_;
    std::vector<std::vector<double>> m_, v_;
    double lr_, decay_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
};

} // namespace aoa::nn
