#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoa/array_model.hpp"
#include "aoa/common.hpp"
#include "aoa/matrix.hpp"

namespace aoa {

// Constant-modulus stand-ins for the narrowband transmissions the receiver
// would capture. The covariance features mask the symbol modulation, so the
// exact waveform only matters as nuisance variation between scenarios.
enum class BasebandKind { complex_tone, linear_chirp, random_qpsk };

BasebandKind baseband_kind_from_string(const std::string& name);
std::string to_string(BasebandKind kind);

struct SourceSpec {
    double angle_deg = 0.0;
    BasebandKind kind = BasebandKind::random_qpsk;
    double power = 1.0;             // linear scale
    double tone_offset_hz = 0.0;    // complex_tone
    double chirp_sweep_hz = 125e3;  // linear_chirp, total sweep across the frame
    double symbol_rate_hz = 62.5e3; // random_qpsk
    std::uint64_t baseband_seed = 0;
};

// Multichannel complex baseband snapshot; rows are array channels.
struct IQFrame {
    Matrix<cplx> samples; // M x N
    double sample_rate = 2e6;
    ArrayConfig config;
    std::uint64_t rng_seed = 0;

    std::size_t num_channels() const { return samples.rows(); }
    std::size_t num_samples() const { return samples.cols(); }
};

inline constexpr std::size_t kDefaultFrameLength = 1u << 15;

// Unit-average-power baseband sequence, deterministic in (spec, seed).
std::vector<cplx> gen_baseband(const SourceSpec& spec, std::size_t length, double sample_rate);

// x = sum_l a(theta_l) * s_l + n (noise only when snr_db is set). With no
// sources the frame is pure noise whose power is 10^(-snr/10) against a
// unit reference.
IQFrame synthesize_frame(const std::vector<SourceSpec>& sources, const ArrayConfig& config,
                         std::size_t length, std::optional<double> snr_db, double sample_rate,
                         std::uint64_t seed);

// Complex AWGN per element and sample; noise power is chosen so that
// 10*log10(signal_power / noise_power) == snr_db with the signal power
// measured from the input frame.
IQFrame add_awgn(const IQFrame& frame, double snr_db, std::uint64_t seed);

double mean_sample_power(const IQFrame& frame);

// Binary frame container: magic 'AOAF', u32 version, u32 M, u64 N,
// f64 sample_rate, u64 seed, then channel-major interleaved little-endian
// float32 I/Q. Array geometry travels out of band.
void save_frame(const IQFrame& frame, const std::string& path);
IQFrame load_frame(const std::string& path, const ArrayConfig& config);

} // namespace aoa
