#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aoa/common.hpp"

namespace aoa::nn {

struct LabelTriple {
    int class_two_sources = 0; // 1 when two sources are present
    double z1 = 0.0;           // encoded angles in (0, 1), ascending
    double z2 = 0.0;
};

// theta in [-74, 74] maps uniformly onto [0, 1].
inline double encode_angle(double theta_deg) {
    if (theta_deg < kFovMinDeg || theta_deg > kFovMaxDeg)
        throw std::invalid_argument("angle outside the [-74, 74] degree FOV");
    return (theta_deg - kFovMinDeg) / (kFovMaxDeg - kFovMinDeg);
}

inline double decode_angle(double z) { return z * (kFovMaxDeg - kFovMinDeg) + kFovMinDeg; }

// Single-source labels repeat the angle: (Class_1, theta, theta).
inline LabelTriple encode_label(double theta1_deg, std::optional<double> theta2_deg) {
    LabelTriple label;
    if (!theta2_deg) {
        label.class_two_sources = 0;
        label.z1 = label.z2 = encode_angle(theta1_deg);
        return label;
    }
    if (*theta2_deg == theta1_deg)
        throw std::invalid_argument("two-source labels need distinct angles");
    label.class_two_sources = 1;
    const double lo = std::min(theta1_deg, *theta2_deg);
    const double hi = std::max(theta1_deg, *theta2_deg);
    label.z1 = encode_angle(lo);
    label.z2 = encode_angle(hi);
    return label;
}

struct Prediction {
    int num_sources = 1;
    std::vector<double> angles_deg; // ascending, length num_sources
    double p_two = 0.0;
    double z1 = 0.0, z2 = 0.0; // raw regression outputs
};

inline Prediction decode_prediction(double p, double z1, double z2, double threshold = 0.5) {
    Prediction pred;
    pred.p_two = p;
    pred.z1 = z1;
    pred.z2 = z2;
    if (p >= threshold) {
        pred.num_sources = 2;
        pred.angles_deg = {decode_angle(z1), decode_angle(z2)};
        std::sort(pred.angles_deg.begin(), pred.angles_deg.end());
    } else {
        pred.num_sources = 1;
        pred.angles_deg = {decode_angle(0.5 * (z1 + z2))};
    }
    return pred;
}

} // namespace aoa::nn
