#pragma once

#include <cstdint>
#include <vector>

#include "aoa/signal_sim.hpp"

namespace aoa {

// Relabels a single-source frame from theta to theta + phi by applying the
// per-element steering-phase difference. Both angles refer to the frame's
// own array config.
IQFrame phase_shift(const IQFrame& frame, double theta_deg, double phi_deg);

// frame_a + frame_b * exp(j*dphi) with dphi ~ Uniform[0, 2*pi) from the
// seed; models the random carrier phase at which two transmissions
// interfere.
IQFrame superimpose(const IQFrame& frame_a, const IQFrame& frame_b, std::uint64_t seed);
IQFrame superimpose_with_phase(const IQFrame& frame_a, const IQFrame& frame_b, double dphi_rad);

double draw_carrier_phase(std::uint64_t seed);

// One noisy copy per SNR level; per-level seeds derive deterministically.
std::vector<IQFrame> expand_awgn(const IQFrame& frame, const std::vector<double>& snr_levels_db,
                                 std::uint64_t seed);

} // namespace aoa
