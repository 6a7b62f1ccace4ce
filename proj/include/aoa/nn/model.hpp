#pragma once

#include <memory>
#include <string>
#include <vector>

#include "aoa/nn/layers.hpp"

namespace aoa::nn {

enum class ArchKind { fc, cnn };

inline ArchKind arch_from_string(const std::string& name) {
    if (name == "fc") return ArchKind::fc;
    if (name == "cnn") return ArchKind::cnn;
    throw config_error("unknown architecture: " + name);
}

inline std::string to_string(ArchKind kind) { return kind == ArchKind::fc ? "fc" : "cnn"; }

template <typename T>
struct HeadOutputs {
    std::vector<T> p;  // probability of two sources
    std::vector<T> z1; // encoded first angle
    std::vector<T> z2; // encoded second angle
};

// Shared trunk with a binary classification head and two angle regression
// heads, all sigmoid scalars.
template <typename T>
class DeepAoANet {
public:
    // input [B, 128] -> 1024 -> 2048 -> 1024 -> 512, dropout 0.2 after each
    static DeepAoANet make_fc(std::uint64_t seed, std::size_t input_dim = 128,
                              double dropout = 0.2) {
        DeepAoANet model;
        model.kind_ = ArchKind::fc;
        model.input_dim_ = input_dim;
        model.dropout_ = dropout;
        Rng rng(Rng::derive(seed, 0x696e6974)); // 'init'
        std::size_t prev = input_dim;
        const std::size_t widths[] = {1024, 2048, 1024, 512};
        for (std::size_t i = 0; i < 4; ++i) {
            model.trunk_.push_back(
                std::make_unique<Dense<T>>(prev, widths[i], "fc" + std::to_string(i + 1), rng));
            model.trunk_.push_back(std::make_unique<ReLU<T>>(std::vector<std::size_t>{widths[i]}));
            model.trunk_.push_back(
                std::make_unique<Dropout<T>>(dropout, std::vector<std::size_t>{widths[i]}));
            prev = widths[i];
        }
        model.make_heads(prev, rng);
        return model;
    }

    // input (4, 4, C) -> conv 512@3x3 -> BN -> ReLU -> maxpool 2x2
    //                 -> 1024 -> 1024 -> 512, dropout 0.2 after each dense
    static DeepAoANet make_cnn(std::uint64_t seed, std::size_t channels = 8,
                               double dropout = 0.2) {
        DeepAoANet model;
        model.kind_ = ArchKind::cnn;
        model.input_dim_ = channels * 16;
        model.channels_ = channels;
        model.dropout_ = dropout;
        Rng rng(Rng::derive(seed, 0x696e6974));
        model.trunk_.push_back(std::make_unique<Conv2d<T>>(channels, 4, 4, 512, 3, "cnn1", rng));
        model.trunk_.push_back(std::make_unique<BatchNorm<T>>(512, 4, "bn1"));
        model.trunk_.push_back(std::make_unique<ReLU<T>>(std::vector<std::size_t>{2, 2, 512}));
        model.trunk_.push_back(std::make_unique<MaxPool2d<T>>(512, 2, 2, 2));
        std::size_t prev = 512;
        const std::size_t widths[] = {1024, 1024, 512};
        for (std::size_t i = 0; i < 3; ++i) {
            model.trunk_.push_back(
                std::make_unique<Dense<T>>(prev, widths[i], "fc" + std::to_string(i + 2), rng));
            model.trunk_.push_back(std::make_unique<ReLU<T>>(std::vector<std::size_t>{widths[i]}));
            model.trunk_.push_back(
                std::make_unique<Dropout<T>>(dropout, std::vector<std::size_t>{widths[i]}));
            prev = widths[i];
        }
        model.make_heads(prev, rng);
        return model;
    }

    static DeepAoANet make(ArchKind kind, std::uint64_t seed) {
        return kind == ArchKind::fc ? make_fc(seed) : make_cnn(seed);
    }

    HeadOutputs<T> forward(const Matrix<T>& x, bool training, Rng& rng) {
        check_input(x);
        Matrix<T> h = x;
        for (auto& layer : trunk_) h = layer->forward(h, training, rng);
        trunk_out_rows_ = h.rows();
        HeadOutputs<T> out;
        out.p = head_class_sig_->forward(head_class_->forward(h, training, rng), training, rng)
                    .values();
        out.z1 = head_reg1_sig_->forward(head_reg1_->forward(h, training, rng), training, rng)
                     .values();
        out.z2 = head_reg2_sig_->forward(head_reg2_->forward(h, training, rng), training, rng)
                     .values();
        return out;
    }

    HeadOutputs<T> infer(const Matrix<T>& x) const {
        check_input(x);
        Matrix<T> h = x;
        for (const auto& layer : trunk_) h = layer->infer(h);
        HeadOutputs<T> out;
        out.p = head_class_sig_->infer(head_class_->infer(h)).values();
        out.z1 = head_reg1_sig_->infer(head_reg1_->infer(h)).values();
        out.z2 = head_reg2_sig_->infer(head_reg2_->infer(h)).values();
        return out;
    }

    // grads are dLoss/d(head output) per sample, after the sigmoid
    void backward(const std::vector<T>& dp, const std::vector<T>& dz1, const std::vector<T>& dz2) {
        Matrix<T> gp(dp.size(), 1);
        gp.values() = dp;
        Matrix<T> g1(dz1.size(), 1);
        g1.values() = dz1;
        Matrix<T> g2(dz2.size(), 1);
        g2.values() = dz2;

        Matrix<T> trunk_grad = head_class_->backward(head_class_sig_->backward(gp));
        const Matrix<T> t1 = head_reg1_->backward(head_reg1_sig_->backward(g1));
        const Matrix<T> t2 = head_reg2_->backward(head_reg2_sig_->backward(g2));
        for (std::size_t i = 0; i < trunk_grad.size(); ++i)
            trunk_grad.data()[i] += t1.data()[i] + t2.data()[i];

        for (auto it = trunk_.rbegin(); it != trunk_.rend(); ++it)
            trunk_grad = (*it)->backward(trunk_grad);
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        for (auto& layer : trunk_) layer->collect_params(out);
        head_class_->collect_params(out);
        head_reg1_->collect_params(out);
        head_reg2_->collect_params(out);
        return out;
    }

    std::vector<BufferRef<T>> buffers() {
        std::vector<BufferRef<T>> out;
        for (auto& layer : trunk_) layer->collect_buffers(out);
        return out;
    }

    void zero_grad() {
        for (ParamRef<T>& p : params()) std::fill(p.grad->begin(), p.grad->end(), T{});
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (const ParamRef<T>& p : params()) n += p.value->size();
        return n;
    }

    std::vector<std::vector<std::size_t>> trunk_output_dims() const {
        std::vector<std::vector<std::size_t>> dims;
        for (const auto& layer : trunk_) dims.push_back(layer->output_dims());
        return dims;
    }

    ArchKind kind() const { return kind_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t channels() const { return channels_; }
    double dropout_rate() const { return dropout_; }

private:
    void make_heads(std::size_t width, Rng& rng) {
        head_class_ = std::make_unique<Dense<T>>(width, 1, "head_class", rng);
        head_reg1_ = std::make_unique<Dense<T>>(width, 1, "head_reg1", rng);
        head_reg2_ = std::make_unique<Dense<T>>(width, 1, "head_reg2", rng);
        head_class_sig_ = std::make_unique<Sigmoid<T>>();
        head_reg1_sig_ = std::make_unique<Sigmoid<T>>();
        head_reg2_sig_ = std::make_unique<Sigmoid<T>>();
    }

    void check_input(const Matrix<T>& x) const {
        if (x.cols() != input_dim_)
            throw config_error("model expects " + std::to_string(input_dim_) +
                               " input features, got " + std::to_string(x.cols()));
    }

    ArchKind kind_ = ArchKind::fc;
    std::size_t input_dim_ = 128;
    std::size_t channels_ = 8;
    double dropout_ = 0.2;
    std::vector<std::unique_ptr<Layer<T>>> trunk_;
    std::unique_ptr<Dense<T>> head_class_, head_reg1_, head_reg2_;
    std::unique_ptr<Sigmoid<T>> head_class_sig_, head_reg1_sig_, head_reg2_sig_;
    std::size_t trunk_out_rows_ = 0;
};

} // namespace aoa::nn
