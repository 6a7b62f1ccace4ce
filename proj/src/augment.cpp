#include "aoa/augment.hpp"

#include <cmath>
#include <stdexcept>

#include "aoa/rng.hpp"

namespace aoa {

IQFrame phase_shift(const IQFrame& frame, double theta_deg, double phi_deg) {
    if (frame.samples.empty()) throw std::invalid_argument("empty frame");
    const double target = theta_deg + phi_deg;
    if (target < kFovMinDeg || target > kFovMaxDeg)
        throw std::invalid_argument("phase shift would leave the [-74, 74] degree FOV");

    // a_m(theta+phi) / a_m(theta): moves the impinging angle without
    // touching the baseband content.
    const double alpha = frame.config.spacing_factor;
    const double delta = std::sin(deg2rad(target)) - std::sin(deg2rad(theta_deg));
    IQFrame out = frame;
    for (std::size_t m = 0; m < out.num_channels(); ++m) {
        const cplx mult = std::polar(1.0, -2.0 * kPi * alpha * static_cast<double>(m) * delta);
        cplx* row = out.samples.row(m);
        for (std::size_t n = 0; n < out.num_samples(); ++n) row[n] *= mult;
    }
    return out;
}

double draw_carrier_phase(std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 0x64706869)); // 'dphi'
    return rng.uniform(0.0, 2.0 * kPi);
}

IQFrame superimpose_with_phase(const IQFrame& frame_a, const IQFrame& frame_b, double dphi_rad) {
    if (frame_a.samples.rows() != frame_b.samples.rows() ||
        frame_a.samples.cols() != frame_b.samples.cols())
        throw std::invalid_argument("superposition needs frames of identical shape");
    if (frame_a.sample_rate != frame_b.sample_rate)
        throw std::invalid_argument("superposition needs matching sample rates");

    const cplx rot = std::polar(1.0, dphi_rad);
    IQFrame out = frame_a;
    const cplx* src = frame_b.samples.data();
    cplx* dst = out.samples.data();
    for (std::size_t i = 0; i < out.samples.size(); ++i) dst[i] += rot * src[i];
    return out;
}

IQFrame superimpose(const IQFrame& frame_a, const IQFrame& frame_b, std::uint64_t seed) {
    IQFrame out = superimpose_with_phase(frame_a, frame_b, draw_carrier_phase(seed));
    out.rng_seed = seed;
    return out;
}

std::vector<IQFrame> expand_awgn(const IQFrame& frame, const std::vector<double>& snr_levels_db,
                                 std::uint64_t seed) {
    std::vector<IQFrame> out;
    out.reserve(snr_levels_db.size());
    for (std::size_t i = 0; i < snr_levels_db.size(); ++i)
        out.push_back(add_awgn(frame, snr_levels_db[i], Rng::derive(seed, i)));
    return out;
}

} // namespace aoa
