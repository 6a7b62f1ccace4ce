#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace aoa::nn {

inline constexpr double kProbClamp = 1e-7;

// Mean binary cross entropy; probabilities clamped away from {0, 1}.
template <typename T>
double bce_loss(const std::vector<T>& p, const std::vector<T>& y) {
    if (p.empty() || p.size() != y.size()) throw std::invalid_argument("bce: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi =
            std::min(1.0 - kProbClamp, std::max(kProbClamp, static_cast<double>(p[i])));
        const double yi = static_cast<double>(y[i]);
        acc += yi * std::log(pi) + (1.0 - yi) * std::log(1.0 - pi);
    }
    return -acc / static_cast<double>(p.size());
}

// d(mean bce)/dp_i, consistent with the clamped forward value.
template <typename T>
void bce_grad(const std::vector<T>& p, const std::vector<T>& y, double weight,
              std::vector<T>& out) {
    out.resize(p.size());
    const double inv_n = weight / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi =
            std::min(1.0 - kProbClamp, std::max(kProbClamp, static_cast<double>(p[i])));
        const double yi = static_cast<double>(y[i]);
        out[i] = static_cast<T>((-yi / pi + (1.0 - yi) / (1.0 - pi)) * inv_n);
    }
}

// Mean squared error over the batch.
template <typename T>
double mse_loss(const std::vector<T>& pred, const std::vector<T>& target) {
    if (pred.empty() || pred.size() != target.size())
        throw std::invalid_argument("mse: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

template <typename T>
void mse_grad(const std::vector<T>& pred, const std::vector<T>& target, double weight,
              std::vector<T>& out) {
    out.resize(pred.size());
    const double scale = 2.0 * weight / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        out[i] =
            static_cast<T>(scale * (static_cast<double>(pred[i]) - static_cast<double>(target[i])));
}

struct LossTerms {
    double classification = 0.0;
    double regression1 = 0.0;
    double regression2 = 0.0;
};

// L = tau . [L_c, L_r1, L_r2]
inline double joint_loss(const LossTerms& losses, const std::array<double, 3>& tau) {
    return tau[0] * losses.classification + tau[1] * losses.regression1 +
           tau[2] * losses.regression2;
}

} // namespace aoa::nn
