#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "aoa/nn/kernels.hpp"
#include "aoa/rng.hpp"

namespace aoa::nn {

template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* value;
    std::vector<T>* grad;
};

template <typename T>
struct BufferRef {
    std::string name;
    std::vector<T>* value;
};

// Trainable layer with a caching train-time path and a const, cache-free
// inference path so trained models can be shared across threads.
template <typename T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual Matrix<T> forward(const Matrix<T>& x, bool training, Rng& rng) = 0;
    virtual Matrix<T> infer(const Matrix<T>& x) const = 0;
    virtual Matrix<T> backward(const Matrix<T>& grad_out) = 0;
    virtual void collect_params(std::vector<ParamRef<T>>&) {}
    virtual void collect_buffers(std::vector<BufferRef<T>>&) {}
    virtual std::vector<std::size_t> output_dims() const = 0;
    virtual std::string describe() const = 0;
};

template <typename T>
class Dense : public Layer<T> {
public:
    Dense(std::size_t in, std::size_t out, std::string name, Rng& init_rng)
        : in_(in), out_(out), name_(std::move(name)), weight_(out, in), wgrad_(out, in),
          bias_(out, T{}), bgrad_(out, T{}) {
        // fan-in scaled uniform init, biases zero
        const double bound = std::sqrt(3.0 / static_cast<double>(in));
        for (T& w : weight_.values()) w = static_cast<T>(init_rng.uniform(-bound, bound));
    }

    Matrix<T> forward(const Matrix<T>& x, bool, Rng&) override {
        input_ = x;
        return infer(x);
    }

    Matrix<T> infer(const Matrix<T>& x) const override {
        if (x.cols() != in_) throw config_error("dense input width mismatch: " + name_);
        Matrix<T> y;
        gemm_a_bt(x, weight_, y);
        add_bias(y, bias_);
        return y;
    }

    Matrix<T> backward(const Matrix<T>& grad_out) override {
        Matrix<T> wg;
        gemm_at_b(grad_out, input_, wg); // [out x in]
        for (std::size_t i = 0; i < wg.size(); ++i) wgrad_.data()[i] += wg.data()[i];
        std::vector<T> bg;
        column_sums(grad_out, bg);
        for (std::size_t i = 0; i < bg.size(); ++i) bgrad_[i] += bg[i];
        Matrix<T> grad_in;
        gemm(grad_out, weight_, grad_in); // [B x in]
        return grad_in;
    }

    void collect_params(std::vector<ParamRef<T>>& out) override {
        out.push_back({name_ + ".weight", &weight_.values(), &wgrad_.values()});
        out.push_back({name_ + ".bias", &bias_, &bgrad_});
    }

    std::vector<std::size_t> output_dims() const override { return {out_}; }
    std::string describe() const override { return "dense " + std::to_string(out_); }

private:
    std::size_t in_, out_;
    std::string name_;
    Matrix<T> weight_, wgrad_;
    std::vector<T> bias_, bgrad_;
    Matrix<T> input_;
};

template <typename T>
class ReLU : public Layer<T> {
public:
    explicit ReLU(std::vector<std::size_t> dims) : dims_(std::move(dims)) {}

    Matrix<T> forward(const Matrix<T>& x, bool, Rng&) override {
        input_ = x;
        return infer(x);
    }

    Matrix<T> infer(const Matrix<T>& x) const override {
        Matrix<T> y = x;
        par::parallel_for(static_cast<std::int64_t>(y.rows()), [&](std::int64_t i) {
            T* row = y.row(static_cast<std::size_t>(i));
            for (std::size_t j = 0; j < y.cols(); ++j) row[j] = row[j] > T{} ? row[j] : T{};
        });
        return y;
    }

    Matrix<T> backward(const Matrix<T>& grad_out) override {
        Matrix<T> g = grad_out;
        par::parallel_for(static_cast<std::int64_t>(g.rows()), [&](std::int64_t i) {
            T* grow = g.row(static_cast<std::size_t>(i));
            const T* xrow = input_.row(static_cast<std::size_t>(i));
            for (std::size_t j = 0; j < g.cols(); ++j)
                if (!(xrow[j] > T{})) grow[j] = T{};
        });
        return g;
    }

    std::vector<std::size_t> output_dims() const override { return dims_; }
    std::string describe() const override { return "relu"; }

private:
    std::vector<std::size_t> dims_;
    Matrix<T> input_;
};

// Inverted dropout: surviving activations are scaled by 1/(1-rate) during
// training so evaluation is a plain forward pass.
template <typename T>
class Dropout : public Layer<T> {
public:
    Dropout(double rate, std::vector<std::size_t> dims) : rate_(rate), dims_(std::move(dims)) {
        if (rate_ < 0.0 || rate_ >= 1.0) throw config_error("dropout rate must be in [0, 1)");
    }

    Matrix<T> forward(const Matrix<T>& x, bool training, Rng& rng) override {
        if (!training || rate_ == 0.0) {
            mask_ = Matrix<T>();
            return x;
        }
        const std::uint64_t call_seed = rng.next_u64();
        const T scale = static_cast<T>(1.0 / (1.0 - rate_));
        mask_ = Matrix<T>(x.rows(), x.cols());
        Matrix<T> y(x.rows(), x.cols());
        par::parallel_for(static_cast<std::int64_t>(x.rows()), [&](std::int64_t i) {
            Rng row_rng(Rng::derive(call_seed, static_cast<std::uint64_t>(i)));
            const T* xrow = x.row(static_cast<std::size_t>(i));
            T* mrow = mask_.row(static_cast<std::size_t>(i));
            T* yrow = y.row(static_cast<std::size_t>(i));
            for (std::size_t j = 0; j < x.cols(); ++j) {
                mrow[j] = row_rng.uniform() >= rate_ ? scale : T{};
                yrow[j] = xrow[j] * mrow[j];
            }
        });
        return y;
    }

    Matrix<T> infer(const Matrix<T>& x) const override { return x; }

    Matrix<T> backward(const Matrix<T>& grad_out) override {
        if (mask_.empty()) return grad_out;
        Matrix<T> g = grad_out;
        for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] *= mask_.data()[i];
        return g;
    }

    std::vector<std::size_t> output_dims() const override { return dims_; }
    std::string describe() const override { return "dropout " + std::to_string(rate_); }

private:
    double rate_;
    std::vector<std::size_t> dims_;
    Matrix<T> mask_;
};

// Valid 2D convolution over channel-major (C, H, W) feature planes flattened
// into matrix rows. Output logical shape is (OH, OW, F).
template <typename T>
class Conv2d : public Layer<T> {
public:
    Conv2d(std::size_t in_channels, std::size_t height, std::size_t width, std::size_t filters,
           std::size_t kernel, std::string name, Rng& init_rng)
        : cin_(in_channels), h_(height), w_(width), f_(filters), k_(kernel),
          oh_(height - kernel + 1), ow_(width - kernel + 1), name_(std::move(name)),
          weight_(filters, in_channels * kernel * kernel),
          wgrad_(filters, in_channels * kernel * kernel), bias_(filters, T{}),
          bgrad_(filters, T{}) {
        if (height < kernel || width < kernel)
            throw config_error("conv kernel larger than its input");
        const double bound = std::sqrt(3.0 / static_cast<double>(cin_ * k_ * k_));
        for (T& w : weight_.values()) w = static_cast<T>(init_rng.uniform(-bound, bound));
    }

    Matrix<T> forward(const Matrix<T>& x, bool, Rng&) override {
        cols_ = im2col(x);
        rows_ = x.rows();
        Matrix<T> y;
        gemm_a_bt(cols_, weight_, y); // [B*OH*OW x F]
        add_bias(y, bias_);
        return rows_to_chw(y, x.rows());
    }

    Matrix<T> infer(const Matrix<T>& x) const override {
        const Matrix<T> cols = im2col(x);
        Matrix<T> y;
        gemm_a_bt(cols, weight_, y);
        add_bias(y, bias_);
        return rows_to_chw(y, x.rows());
    }

    Matrix<T> backward(const Matrix<T>& grad_out) override {
        const Matrix<T> grows = chw_to_rows(grad_out, rows_); // [B*OH*OW x F]
        Matrix<T> wg;
        gemm_at_b(grows, cols_, wg); // [F x K]
        for (std::size_t i = 0; i < wg.size(); ++i) wgrad_.data()[i] += wg.data()[i];
        std::vector<T> bg;
        column_sums(grows, bg);
        for (std::size_t i = 0; i < bg.size(); ++i) bgrad_[i] += bg[i];

        Matrix<T> dcols;
        gemm(grows, weight_, dcols); // [B*OH*OW x K]
        return col2im(dcols, rows_);
    }

    void collect_params(std::vector<ParamRef<T>>& out) override {
        out.push_back({name_ + ".weight", &weight_.values(), &wgrad_.values()});
        out.push_back({name_ + ".bias", &bias_, &bgrad_});
    }

    std::vector<std::size_t> output_dims() const override { return {oh_, ow_, f_}; }
    std::string describe() const override {
        return "conv2d " + std::to_string(f_) + "x" + std::to_string(k_) + "x" + std::to_string(k_);
    }

private:
    Matrix<T> im2col(const Matrix<T>& x) const {
        if (x.cols() != cin_ * h_ * w_) throw config_error("conv input size mismatch: " + name_);
        Matrix<T> cols(x.rows() * oh_ * ow_, cin_ * k_ * k_);
        par::parallel_for(static_cast<std::int64_t>(x.rows()), [&](std::int64_t b) {
            const T* xr = x.row(static_cast<std::size_t>(b));
            for (std::size_t oh = 0; oh < oh_; ++oh)
                for (std::size_t ow = 0; ow < ow_; ++ow) {
                    T* crow = cols.row((static_cast<std::size_t>(b) * oh_ + oh) * ow_ + ow);
                    std::size_t k = 0;
                    for (std::size_t c = 0; c < cin_; ++c)
                        for (std::size_t ki = 0; ki < k_; ++ki)
                            for (std::size_t kj = 0; kj < k_; ++kj)
                                crow[k++] = xr[c * h_ * w_ + (oh + ki) * w_ + (ow + kj)];
                }
        });
        return cols;
    }

    Matrix<T> col2im(const Matrix<T>& dcols, std::size_t batch) const {
        Matrix<T> dx(batch, cin_ * h_ * w_);
        par::parallel_for(static_cast<std::int64_t>(batch), [&](std::int64_t b) {
            T* xr = dx.row(static_cast<std::size_t>(b));
            for (std::size_t oh = 0; oh < oh_; ++oh)
                for (std::size_t ow = 0; ow < ow_; ++ow) {
                    const T* crow = dcols.row((static_cast<std::size_t>(b) * oh_ + oh) * ow_ + ow);
                    std::size_t k = 0;
                    for (std::size_t c = 0; c < cin_; ++c)
                        for (std::size_t ki = 0; ki < k_; ++ki)
                            for (std::size_t kj = 0; kj < k_; ++kj)
                                xr[c * h_ * w_ + (oh + ki) * w_ + (ow + kj)] += crow[k++];
                }
        });
        return dx;
    }

    // [B*OH*OW x F] -> [B x F*OH*OW] channel-major planes
    Matrix<T> rows_to_chw(const Matrix<T>& y, std::size_t batch) const {
        Matrix<T> out(batch, f_ * oh_ * ow_);
        par::parallel_for(static_cast<std::int64_t>(batch), [&](std::int64_t b) {
            T* orow = out.row(static_cast<std::size_t>(b));
            for (std::size_t p = 0; p < oh_ * ow_; ++p) {
                const T* yrow = y.row(static_cast<std::size_t>(b) * oh_ * ow_ + p);
                for (std::size_t f = 0; f < f_; ++f) orow[f * oh_ * ow_ + p] = yrow[f];
            }
        });
        return out;
    }

    Matrix<T> chw_to_rows(const Matrix<T>& g, std::size_t batch) const {
        Matrix<T> out(batch * oh_ * ow_, f_);
        par::parallel_for(static_cast<std::int64_t>(batch), [&](std::int64_t b) {
            const T* grow = g.row(static_cast<std::size_t>(b));
            for (std::size_t p = 0; p < oh_ * ow_; ++p) {
                T* orow = out.row(static_cast<std::size_t>(b) * oh_ * ow_ + p);
                for (std::size_t f = 0; f < f_; ++f) orow[f] = grow[f * oh_ * ow_ + p];
            }
        });
        return out;
    }

    std::size_t cin_, h_, w_, f_, k_, oh_, ow_;
    std::string name_;
    Matrix<T> weight_, wgrad_;
    std::vector<T> bias_, bgrad_;
    Matrix<T> cols_;
    std::size_t rows_ = 0;
};

// Per-channel batch normalization over (B, OH, OW); batch statistics during
// training, running statistics (momentum 0.99) elsewhere.
template <typename T>
class BatchNorm : public Layer<T> {
public:
    BatchNorm(std::size_t channels, std::size_t spatial, std::string name)
        : c_(channels), spatial_(spatial), name_(std::move(name)), gamma_(channels, T{1}),
          ggrad_(channels, T{}), beta_(channels, T{}), bgrad_(channels, T{}),
          running_mean_(channels, T{}), running_var_(channels, T{1}) {}

    Matrix<T> forward(const Matrix<T>& x, bool training, Rng&) override {
        if (!training) return infer(x);
        check_width(x);
        input_ = x;
        const std::size_t n = x.rows() * spatial_;
        mean_.assign(c_, 0.0);
        inv_std_.assign(c_, 0.0);
        Matrix<T> y(x.rows(), x.cols());
        xhat_ = Matrix<T>(x.rows(), x.cols());
        par::parallel_for(static_cast<std::int64_t>(c_), [&](std::int64_t ci) {
            const std::size_t c = static_cast<std::size_t>(ci);
            double sum = 0.0, sumsq = 0.0;
            for (std::size_t b = 0; b < x.rows(); ++b) {
                const T* row = x.row(b) + c * spatial_;
                for (std::size_t s = 0; s < spatial_; ++s) {
                    sum += static_cast<double>(row[s]);
                    sumsq += static_cast<double>(row[s]) * static_cast<double>(row[s]);
                }
            }
            const double mean = sum / static_cast<double>(n);
            const double var = sumsq / static_cast<double>(n) - mean * mean; // biased
            mean_[c] = mean;
            inv_std_[c] = 1.0 / std::sqrt(var + kEps);
            running_mean_[c] =
                static_cast<T>(kMomentum * running_mean_[c] + (1.0 - kMomentum) * mean);
            running_var_[c] = static_cast<T>(kMomentum * running_var_[c] + (1.0 - kMomentum) * var);
            const double g = static_cast<double>(gamma_[c]);
            const double bt = static_cast<double>(beta_[c]);
            for (std::size_t b = 0; b < x.rows(); ++b) {
                const T* row = x.row(b) + c * spatial_;
                T* xh = xhat_.row(b) + c * spatial_;
                T* yr = y.row(b) + c * spatial_;
                for (std::size_t s = 0; s < spatial_; ++s) {
                    xh[s] = static_cast<T>((static_cast<double>(row[s]) - mean) * inv_std_[c]);
                    yr[s] = static_cast<T>(g * static_cast<double>(xh[s]) + bt);
                }
            }
        });
        return y;
    }

    Matrix<T> infer(const Matrix<T>& x) const override {
        check_width(x);
        Matrix<T> y(x.rows(), x.cols());
        par::parallel_for(static_cast<std::int64_t>(c_), [&](std::int64_t ci) {
            const std::size_t c = static_cast<std::size_t>(ci);
            const double inv = 1.0 / std::sqrt(static_cast<double>(running_var_[c]) + kEps);
            const double g = static_cast<double>(gamma_[c]);
            const double bt = static_cast<double>(beta_[c]);
            const double mean = static_cast<double>(running_mean_[c]);
            for (std::size_t b = 0; b < x.rows(); ++b) {
                const T* row = x.row(b) + c * spatial_;
                T* yr = y.row(b) + c * spatial_;
                for (std::size_t s = 0; s < spatial_; ++s)
                    yr[s] = static_cast<T>(g * (static_cast<double>(row[s]) - mean) * inv + bt);
            }
        });
        return y;
    }

    Matrix<T> backward(const Matrix<T>& grad_out) override {
        const std::size_t n = grad_out.rows() * spatial_;
        Matrix<T> g(grad_out.rows(), grad_out.cols());
        par::parallel_for(static_cast<std::int64_t>(c_), [&](std::int64_t ci) {
            const std::size_t c = static_cast<std::size_t>(ci);
            double dgamma = 0.0, dbeta = 0.0;
            for (std::size_t b = 0; b < grad_out.rows(); ++b) {
                const T* gr = grad_out.row(b) + c * spatial_;
                const T* xh = xhat_.row(b) + c * spatial_;
                for (std::size_t s = 0; s < spatial_; ++s) {
                    dgamma += static_cast<double>(gr[s]) * static_cast<double>(xh[s]);
                    dbeta += static_cast<double>(gr[s]);
                }
            }
            ggrad_[c] += static_cast<T>(dgamma);
            bgrad_[c] += static_cast<T>(dbeta);
            const double scale = static_cast<double>(gamma_[c]) * inv_std_[c];
            const double mg = dbeta / static_cast<double>(n);
            const double mgx = dgamma / static_cast<double>(n);
            for (std::size_t b = 0; b < grad_out.rows(); ++b) {
                const T* gr = grad_out.row(b) + c * spatial_;
                const T* xh = xhat_.row(b) + c * spatial_;
                T* out = g.row(b) + c * spatial_;
                for (std::size_t s = 0; s < spatial_; ++s)
                    out[s] = static_cast<T>(
                        scale * (static_cast<double>(gr[s]) - mg - static_cast<double>(xh[s]) * mgx));
            }
        });
        return g;
    }

    void collect_params(std::vector<ParamRef<T>>& out) override {
        out.push_back({name_ + ".gamma", &gamma_, &ggrad_});
        out.push_back({name_ + ".beta", &beta_, &bgrad_});
    }

    void collect_buffers(std::vector<BufferRef<T>>& out) override {
        out.push_back({name_ + ".running_mean", &running_mean_});
        out.push_back({name_ + ".running_var", &running_var_});
    }

    std::vector<std::size_t> output_dims() const override {
        return {spatial_side(), spatial_side(), c_};
    }
    std::string describe() const override { return "batchnorm"; }

    static constexpr double kEps = 1e-3;
    static constexpr double kMomentum = 0.99;

private:
    std::size_t spatial_side() const {
        std::size_t s = 1;
        while (s * s < spatial_) ++s;
        return s;
    }
    void check_width(const Matrix<T>& x) const {
        if (x.cols() != c_ * spatial_) throw config_error("batchnorm input size mismatch: " + name_);
    }

    std::size_t c_, spatial_;
    std::string name_;
    std::vector<T> gamma_, ggrad_, beta_, bgrad_;
    std::vector<T> running_mean_, running_var_;
    std::vector<double> mean_, inv_std_;
    Matrix<T> input_, xhat_;
};

template <typename T>
class MaxPool2d : public Layer<T> {
public:
    MaxPool2d(std::size_t channels, std::size_t height, std::size_t width, std::size_t pool)
        : c_(channels), h_(height), w_(width), p_(pool), oh_(height / pool), ow_(width / pool) {
        if (oh_ == 0 || ow_ == 0) throw config_error("pool size larger than its input");
    }

    Matrix<T> forward(const Matrix<T>& x, bool, Rng&) override {
        argmax_.assign(x.rows() * c_ * oh_ * ow_, 0);
        return pool(x, &argmax_);
    }

    Matrix<T> infer(const Matrix<T>& x) const override { return pool(x, nullptr); }

    Matrix<T> backward(const Matrix<T>& grad_out) override {
        Matrix<T> g(grad_out.rows(), c_ * h_ * w_);
        par::parallel_for(static_cast<std::int64_t>(grad_out.rows()), [&](std::int64_t b) {
            const T* gr = grad_out.row(static_cast<std::size_t>(b));
            T* out = g.row(static_cast<std::size_t>(b));
            for (std::size_t i = 0; i < c_ * oh_ * ow_; ++i)
                out[argmax_[static_cast<std::size_t>(b) * c_ * oh_ * ow_ + i]] += gr[i];
        });
        return g;
    }

    std::vector<std::size_t> output_dims() const override { return {oh_, ow_, c_}; }
    std::string describe() const override { return "maxpool " + std::to_string(p_); }

private:
    Matrix<T> pool(const Matrix<T>& x, std::vector<std::size_t>* argmax) const {
        if (x.cols() != c_ * h_ * w_) throw config_error("maxpool input size mismatch");
        Matrix<T> y(x.rows(), c_ * oh_ * ow_);
        par::parallel_for(static_cast<std::int64_t>(x.rows()), [&](std::int64_t b) {
            const T* xr = x.row(static_cast<std::size_t>(b));
            T* yr = y.row(static_cast<std::size_t>(b));
            for (std::size_t c = 0; c < c_; ++c)
                for (std::size_t oh = 0; oh < oh_; ++oh)
                    for (std::size_t ow = 0; ow < ow_; ++ow) {
                        std::size_t best = c * h_ * w_ + (oh * p_) * w_ + ow * p_;
                        for (std::size_t pi = 0; pi < p_; ++pi)
                            for (std::size_t pj = 0; pj < p_; ++pj) {
                                const std::size_t idx =
                                    c * h_ * w_ + (oh * p_ + pi) * w_ + (ow * p_ + pj);
                                if (xr[idx] > xr[best]) best = idx;
                            }
                        const std::size_t o = c * oh_ * ow_ + oh * ow_ + ow;
                        yr[o] = xr[best];
                        if (argmax)
                            (*argmax)[static_cast<std::size_t>(b) * c_ * oh_ * ow_ + o] = best;
                    }
        });
        return y;
    }

    std::size_t c_, h_, w_, p_, oh_, ow_;
    std::vector<std::size_t> argmax_;
};

template <typename T>
class Sigmoid : public Layer<T> {
public:
    explicit Sigmoid(std::vector<std::size_t> dims = {1}) : dims_(std::move(dims)) {}

    Matrix<T> forward(const Matrix<T>& x, bool, Rng&) override {
        output_ = infer(x);
        return output_;
    }

    Matrix<T> infer(const Matrix<T>& x) const override {
        Matrix<T> y = x;
        for (T& v : y.values()) {
            const double d = static_cast<double>(v);
            v = static_cast<T>(d >= 0.0 ? 1.0 / (1.0 + std::exp(-d))
                                        : std::exp(d) / (1.0 + std::exp(d)));
        }
        return y;
    }

    Matrix<T> backward(const Matrix<T>& grad_out) override {
        Matrix<T> g = grad_out;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const T y = output_.data()[i];
            g.data()[i] *= y * (T{1} - y);
        }
        return g;
    }

    std::vector<std::size_t> output_dims() const override { return dims_; }
    std::string describe() const override { return "sigmoid"; }

private:
    std::vector<std::size_t> dims_;
    Matrix<T> output_;
};

} // namespace aoa::nn
