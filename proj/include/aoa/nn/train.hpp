#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "aoa/metrics.hpp"
#include "aoa/nn/adam.hpp"
#include "aoa/nn/labels.hpp"
#include "aoa/nn/losses.hpp"
#include "aoa/nn/model.hpp"

namespace aoa::nn {

struct TauStage {
    int epochs = 0;
    std::array<double, 3> tau{1.0, 1.0, 1.0};
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double lr_decay = 1e-6;
    std::size_t batch_size = 512;
    // suppress the classification weight once accuracy saturates so the
    // regression heads keep improving
    std::vector<TauStage> schedule{{40, {0.1, 1.0, 1.0}}, {10, {0.001, 1.0, 1.0}}};
    std::uint64_t seed = 1;
    double classification_threshold = 0.5;
    std::function<void(const struct EpochStats&)> on_epoch; // optional progress hook
};

// Model-ready split: scaled features plus encoded and raw labels.
template <typename T>
struct LabeledMatrix {
    Matrix<T> features; // N x 128
    std::vector<T> class_two;
    std::vector<T> z1, z2;
    std::vector<EvalRecord> truth; // pred fields filled during evaluation

    std::size_t size() const { return features.rows(); }
};

struct EpochStats {
    int epoch = 0;
    double loss_classification = 0.0;
    double loss_regression1 = 0.0;
    double loss_regression2 = 0.0;
    double val_rmse = 0.0;
    double val_accuracy = 0.0;
};

// Forward a split in evaluation mode and decode predictions into EvalRecords.
template <typename T>
std::vector<EvalRecord> evaluate_split(const DeepAoANet<T>& model, const LabeledMatrix<T>& split,
                                       double threshold = 0.5,
                                       std::size_t batch_size = 512) {
    std::vector<EvalRecord> records = split.truth;
    for (std::size_t start = 0; start < split.size(); start += batch_size) {
        const std::size_t n = std::min(batch_size, split.size() - start);
        Matrix<T> batch(n, split.features.cols());
        for (std::size_t i = 0; i < n; ++i)
            std::copy(split.features.row(start + i),
                      split.features.row(start + i) + split.features.cols(), batch.row(i));
        const HeadOutputs<T> out = model.infer(batch);
        for (std::size_t i = 0; i < n; ++i) {
            const Prediction pred =
                decode_prediction(static_cast<double>(out.p[i]), static_cast<double>(out.z1[i]),
                                  static_cast<double>(out.z2[i]), threshold);
            EvalRecord& r = records[start + i];
            r.pred_count = pred.num_sources;
            const double lo = decode_angle(std::min(out.z1[i], out.z2[i]));
            const double hi = decode_angle(std::max(out.z1[i], out.z2[i]));
            r.pred_angles_deg = {lo, hi};
        }
    }
    return records;
}

template <typename T>
double classification_accuracy(const std::vector<EvalRecord>& records) {
    if (records.empty()) return 0.0;
    std::size_t hit = 0;
    for (const EvalRecord& r : records)
        if (r.pred_count == r.true_count) ++hit;
    return static_cast<double>(hit) / static_cast<double>(records.size());
}

template <typename T>
std::vector<EpochStats> train_model(DeepAoANet<T>& model, const LabeledMatrix<T>& train,
                                    const LabeledMatrix<T>& val, const TrainConfig& config) {
    if (train.size() == 0) throw config_error("training split is empty");
    if (config.batch_size == 0) throw config_error("batch size must be positive");

    Adam<T> optimizer(model.params(), config.learning_rate, config.lr_decay);
    Rng shuffle_rng(Rng::derive(config.seed, 0x73687566)); // 'shuf'

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<EpochStats> history;
    int epoch = 0;
    for (const TauStage& stage : config.schedule) {
        for (int e = 0; e < stage.epochs; ++e, ++epoch) {
            deterministic_shuffle(order, shuffle_rng);
            double sum_lc = 0.0, sum_l1 = 0.0, sum_l2 = 0.0;
            std::size_t batches = 0;
            for (std::size_t start = 0; start < train.size(); start += config.batch_size) {
                const std::size_t n = std::min(config.batch_size, train.size() - start);
                Matrix<T> batch(n, train.features.cols());
                std::vector<T> by(n), bz1(n), bz2(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t src = order[start + i];
                    std::copy(train.features.row(src),
                              train.features.row(src) + train.features.cols(), batch.row(i));
                    by[i] = train.class_two[src];
                    bz1[i] = train.z1[src];
                    bz2[i] = train.z2[src];
                }

                Rng step_rng(Rng::derive(config.seed, 0x10000u + static_cast<std::uint64_t>(
                                                                     optimizer.step_count())));
                model.zero_grad();
                const HeadOutputs<T> out = model.forward(batch, true, step_rng);

                sum_lc += bce_loss(out.p, by);
                sum_l1 += mse_loss(out.z1, bz1);
                sum_l2 += mse_loss(out.z2, bz2);
                ++batches;

                std::vector<T> dp, dz1, dz2;
                bce_grad(out.p, by, stage.tau[0], dp);
                mse_grad(out.z1, bz1, stage.tau[1], dz1);
                mse_grad(out.z2, bz2, stage.tau[2], dz2);
                model.backward(dp, dz1, dz2);
                optimizer.step();
            }

            EpochStats stats;
            stats.epoch = epoch + 1;
            stats.loss_classification = sum_lc / static_cast<double>(batches);
            stats.loss_regression1 = sum_l1 / static_cast<double>(batches);
            stats.loss_regression2 = sum_l2 / static_cast<double>(batches);
            if (val.size() > 0) {
                const std::vector<EvalRecord> records = evaluate_split(
                    model, val, config.classification_threshold, config.batch_size);
                stats.val_rmse = penalized_rmse(records);
                stats.val_accuracy = classification_accuracy<T>(records);
            }
            if (config.on_epoch) config.on_epoch(stats);
            history.push_back(stats);
        }
    }
    return history;
}

} // namespace aoa::nn
