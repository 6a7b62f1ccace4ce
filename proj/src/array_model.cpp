#include "aoa/array_model.hpp"

#include <cmath>
#include <stdexcept>

namespace aoa {

void ArrayConfig::validate() const {
    if (num_elements < 2) throw std::invalid_argument("array needs at least 2 elements");
    if (spacing_factor <= 0.0) throw std::invalid_argument("spacing factor must be positive");
    if (wavelength <= 0.0) throw std::invalid_argument("wavelength must be positive");
    if (carrier_frequency <= 0.0) throw std::invalid_argument("carrier frequency must be positive");
}

double wave_number(double wavelength_m) {
    if (wavelength_m <= 0.0) throw std::invalid_argument("wavelength must be positive");
    return 2.0 * kPi / wavelength_m;
}

std::vector<double> element_positions(const ArrayConfig& config) {
    config.validate();
    std::vector<double> y(static_cast<std::size_t>(config.num_elements));
    for (std::size_t m = 0; m < y.size(); ++m)
        y[m] = config.spacing_factor * static_cast<double>(m) * config.wavelength;
    return y;
}

SteeringVector steering_vector(double theta_deg, const ArrayConfig& config) {
    config.validate();
    if (theta_deg < -90.0 || theta_deg > 90.0)
        throw std::invalid_argument("steering angle outside [-90, 90] degrees");
    SteeringVector sv;
    sv.angle_deg = theta_deg;
    sv.elements.resize(static_cast<std::size_t>(config.num_elements));
    const double phase_step = -2.0 * kPi * config.spacing_factor * std::sin(deg2rad(theta_deg));
    for (std::size_t m = 0; m < sv.elements.size(); ++m)
        sv.elements[m] = std::polar(1.0, phase_step * static_cast<double>(m));
    return sv;
}

namespace {

// Normalized power response; computed straight from sines so scan angles
// beyond +/-90 deg are meaningful (mirror region of the linear array).
double array_power(double steer_deg, double scan_deg, const ArrayConfig& config) {
    const int m = config.num_elements;
    const double du = 2.0 * kPi * config.spacing_factor *
                      (std::sin(deg2rad(scan_deg)) - std::sin(deg2rad(steer_deg)));
    cplx sum = 0.0;
    for (int i = 0; i < m; ++i) sum += std::polar(1.0, du * static_cast<double>(i));
    const double mag = std::abs(sum) / static_cast<double>(m);
    return mag * mag;
}

} // namespace

std::vector<double> array_factor_db(double steer_deg, const std::vector<double>& scan_deg,
                                    const ArrayConfig& config) {
    config.validate();
    if (scan_deg.empty()) throw std::invalid_argument("scan grid must be non-empty");
    std::vector<double> out(scan_deg.size());
    for (std::size_t i = 0; i < scan_deg.size(); ++i) {
        const double p = array_power(steer_deg, scan_deg[i], config);
        out[i] = p > 0.0 ? 10.0 * std::log10(p) : -300.0;
    }
    return out;
}

double half_power_beamwidth_deg(double steer_deg, const ArrayConfig& config, double scan_step_deg) {
    config.validate();
    if (scan_step_deg <= 0.0) throw std::invalid_argument("scan step must be positive");
    const double half_power = 0.5;
    // walk outward from the steering angle until the response drops below -3 dB
    double lo = steer_deg;
    while (lo > steer_deg - 360.0 && array_power(steer_deg, lo - scan_step_deg, config) >= half_power)
        lo -= scan_step_deg;
    double hi = steer_deg;
    while (hi < steer_deg + 360.0 && array_power(steer_deg, hi + scan_step_deg, config) >= half_power)
        hi += scan_step_deg;
    return hi - lo;
}

} // namespace aoa
