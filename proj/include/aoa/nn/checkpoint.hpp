#pragma once

#include <string>

#include "aoa/dataset.hpp"
#include "aoa/nn/model.hpp"

namespace aoa::nn {

// Versioned binary checkpoint: magic, a JSON descriptor (architecture,
// dropout, feature scaler, decision threshold), then named little-endian
// float32 blobs for every parameter and batchnorm running statistic.
struct Checkpoint {
    DeepAoANet<float> model;
    Scaler scaler;
    double threshold = 0.5;
};

void save_checkpoint(DeepAoANet<float>& model, const Scaler& scaler, const std::string& path,
                     double threshold = 0.5);
Checkpoint load_checkpoint(const std::string& path);

} // namespace aoa::nn
