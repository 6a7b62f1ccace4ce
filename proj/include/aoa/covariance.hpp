#pragma once

#include <cstdint>
#include <vector>

#include "aoa/matrix.hpp"
#include "aoa/signal_sim.hpp"

namespace aoa {

// Sliding-window sample covariance matrices of one frame, in window order.
struct CovarianceStack {
    std::vector<CxMatrix> matrices; // C Hermitian M x M matrices
    std::size_t window_length = 0;
    std::uint64_t source_frame_id = 0;

    std::size_t count() const { return matrices.size(); }
};

inline constexpr std::size_t kDefaultWindowLength = 1u << 12;
inline constexpr std::size_t kDefaultWindowCount = 8;

// R = (1/W) * sum_n x[n] x[n]^H over an M x W window.
CxMatrix sample_covariance(const Matrix<cplx>& window);

// C consecutive non-overlapping windows; the 2^15-sample default frame tiles
// into exactly 8 windows of 2^12.
CovarianceStack stack_covariances(const IQFrame& frame,
                                  std::size_t window_length = kDefaultWindowLength,
                                  std::size_t count = kDefaultWindowCount);

CxMatrix average_covariance(const CovarianceStack& stack);

// True iff strictly more than `fraction` of the off-diagonal magnitudes
// exceed the threshold. Correlated signal fills the off-diagonals; noise
// does not.
bool detect_signal(const CxMatrix& r, double magnitude_threshold = 1e-4, double fraction = 0.9);

// Absolute threshold scaled off the mean diagonal power. The published rule
// uses a fixed 1e-4 against the SDR's ADC scale; synthetic frames carry unit
// power, so the gate is recalibrated relative to trace(R)/M.
double relative_detection_threshold(const CxMatrix& r, double relative_level = 0.1);

// 128-element serialized stack (M=4, C=8), unit norm per 16-value block.
struct FeatureVector {
    std::vector<double> values;
};

// Same values reshaped (M, M, C); stored plane-contiguous by window so the
// channel-wise flattening equals the FeatureVector layout.
struct FeatureImage {
    std::vector<double> values;
    std::size_t side = 4;
    std::size_t channels = 8;
};

inline constexpr std::size_t kFeatureLength = 128;
inline constexpr std::size_t kFeatureBlock = 16;

// Per window: the 10 upper-triangle real parts (j <= k, row-major), then the
// 6 strict-lower-triangle imaginary parts (j > k, row-major), normalized to
// unit Euclidean norm.
FeatureVector serialize_features(const CovarianceStack& stack);
FeatureImage featurize_image(const CovarianceStack& stack);

// Rebuild each Hermitian matrix from its serialized block; the per-block
// normalization constant is the only information lost.
std::vector<CxMatrix> reconstruct_from_features(const FeatureVector& features);

} // namespace aoa
