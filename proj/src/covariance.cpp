#include "aoa/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include "aoa/parallel.hpp"

namespace aoa {

CxMatrix sample_covariance(const Matrix<cplx>& window) {
    if (window.rows() == 0 || window.cols() == 0)
        throw std::invalid_argument("covariance window must be non-empty");
    const std::size_t m = window.rows();
    const std::size_t w = window.cols();
    CxMatrix r(m, m);
    // accumulate the lower triangle, then mirror; keeps R exactly Hermitian
    for (std::size_t i = 0; i < m; ++i) {
        const cplx* xi = window.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const cplx* xj = window.row(j);
            cplx acc = 0.0;
            for (std::size_t n = 0; n < w; ++n) acc += xi[n] * std::conj(xj[n]);
            acc /= static_cast<double>(w);
            r(i, j) = acc;
            if (i == j)
                r(i, j) = cplx(acc.real(), 0.0);
            else
                r(j, i) = std::conj(acc);
        }
    }
    return r;
}

CovarianceStack stack_covariances(const IQFrame& frame, std::size_t window_length,
                                  std::size_t count) {
    if (window_length == 0 || count == 0)
        throw std::invalid_argument("window length and count must be positive");
    if (frame.num_samples() < window_length * count)
        throw std::invalid_argument("frame shorter than window_length * count");
    const std::size_t m = frame.num_channels();

    CovarianceStack stack;
    stack.window_length = window_length;
    stack.source_frame_id = frame.rng_seed;
    stack.matrices.assign(count, CxMatrix());
    par::parallel_for(static_cast<std::int64_t>(count), [&](std::int64_t c) {
        Matrix<cplx> window(m, window_length);
        const std::size_t offset = static_cast<std::size_t>(c) * window_length;
        for (std::size_t i = 0; i < m; ++i) {
            const cplx* src = frame.samples.row(i) + offset;
            cplx* dst = window.row(i);
            for (std::size_t n = 0; n < window_length; ++n) dst[n] = src[n];
        }
        stack.matrices[static_cast<std::size_t>(c)] = sample_covariance(window);
    });
    return stack;
}

CxMatrix average_covariance(const CovarianceStack& stack) {
    if (stack.matrices.empty()) throw std::invalid_argument("empty covariance stack");
    const std::size_t m = stack.matrices.front().rows();
    CxMatrix avg(m, m);
    for (const CxMatrix& r : stack.matrices)
        for (std::size_t i = 0; i < avg.size(); ++i) avg.data()[i] += r.data()[i];
    const double scale = 1.0 / static_cast<double>(stack.matrices.size());
    for (std::size_t i = 0; i < avg.size(); ++i) avg.data()[i] *= scale;
    return avg;
}

bool detect_signal(const CxMatrix& r, double magnitude_threshold, double fraction) {
    const std::size_t m = r.rows();
    if (m == 0 || r.cols() != m) throw std::invalid_argument("detector needs a square matrix");
    std::size_t above = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j && std::abs(r(i, j)) > magnitude_threshold) ++above;
    const double total = static_cast<double>(m * m - m);
    return static_cast<double>(above) > fraction * total;
}

double relative_detection_threshold(const CxMatrix& r, double relative_level) {
    const std::size_t m = r.rows();
    if (m == 0 || r.cols() != m) throw std::invalid_argument("detector needs a square matrix");
    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += r(i, i).real();
    return relative_level * trace / static_cast<double>(m);
}

namespace {

// One serialized block: [10 upper-triangle real parts | 6 strict-lower
// imaginary parts], unit norm.
void serialize_block(const CxMatrix& r, double* out) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t c = j; c < 4; ++c) out[k++] = r(j, c).real();
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t c = 0; c < j; ++c) out[k++] = r(j, c).imag();
    double norm = 0.0;
    for (std::size_t i = 0; i < kFeatureBlock; ++i) norm += out[i] * out[i];
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw numeric_error("degenerate covariance block: zero or non-finite norm");
    for (std::size_t i = 0; i < kFeatureBlock; ++i) out[i] /= norm;
}

void check_stack_shape(const CovarianceStack& stack) {
    if (stack.matrices.empty()) throw std::invalid_argument("empty covariance stack");
    for (const CxMatrix& r : stack.matrices)
        if (r.rows() != 4 || r.cols() != 4)
            throw config_error("feature serialization requires a 4-element array");
}

} // namespace

FeatureVector serialize_features(const CovarianceStack& stack) {
    check_stack_shape(stack);
    FeatureVector f;
    f.values.resize(stack.count() * kFeatureBlock);
    for (std::size_t c = 0; c < stack.count(); ++c)
        serialize_block(stack.matrices[c], f.values.data() + c * kFeatureBlock);
    return f;
}

FeatureImage featurize_image(const CovarianceStack& stack) {
    check_stack_shape(stack);
    FeatureImage img;
    img.side = 4;
    img.channels = stack.count();
    // each window block reshapes row-major into one 4x4 plane, so the
    // plane-contiguous layout flattens back to the feature vector
    img.values = serialize_features(stack).values;
    return img;
}

std::vector<CxMatrix> reconstruct_from_features(const FeatureVector& features) {
    if (features.values.size() % kFeatureBlock != 0)
        throw std::invalid_argument("feature length must be a multiple of 16");
    const std::size_t blocks = features.values.size() / kFeatureBlock;
    std::vector<CxMatrix> out(blocks, CxMatrix(4, 4));
    for (std::size_t c = 0; c < blocks; ++c) {
        const double* b = features.values.data() + c * kFeatureBlock;
        CxMatrix& r = out[c];
        std::size_t k = 0;
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t col = j; col < 4; ++col) {
                r(j, col) += b[k];
                if (j != col) r(col, j) += b[k];
                ++k;
            }
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t col = 0; col < j; ++col) {
                r(j, col) += cplx(0.0, b[k]);
                r(col, j) += cplx(0.0, -b[k]);
                ++k;
            }
    }
    return out;
}

} // namespace aoa
