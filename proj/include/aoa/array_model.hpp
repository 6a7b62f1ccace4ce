#pragma once

#include <vector>

#include "aoa/common.hpp"

namespace aoa {

// Uniform linear array geometry. Element m sits at alpha*(m-1)*lambda along
// the array axis, so the steering phase depends on alpha alone and the
// wavelength never leaks into the feature pipeline.
struct ArrayConfig {
    int num_elements = 4;
    double spacing_factor = 0.2;                      // alpha, in wavelengths
    double carrier_frequency = 868e6;                 // Hz
    double wavelength = kSpeedOfLight / 868e6;        // meters

    void validate() const; // throws std::invalid_argument
};

struct SteeringVector {
    double angle_deg = 0.0;
    std::vector<cplx> elements; // unit modulus, elements[0] == 1
};

// k = 2*pi/lambda [rad/m].
double wave_number(double wavelength_m);

// y_m = alpha*(m-1)*lambda, ascending, y_1 = 0.
std::vector<double> element_positions(const ArrayConfig& config);

// a_m(theta) = exp(-j*2*pi*alpha*(m-1)*sin(theta)). theta in [-90, 90] deg.
SteeringVector steering_vector(double theta_deg, const ArrayConfig& config);

// |a(steer)^H a(scan)|^2 / M^2 in dB; the main lobe sits at 0 dB. The scan
// grid may extend past +/-90 deg so beam widths that wrap through endfire
// can be measured on the full circle.
std::vector<double> array_factor_db(double steer_deg, const std::vector<double>& scan_deg,
                                    const ArrayConfig& config);

// Width of the contiguous -3 dB region around the steering angle, measured
// on the full circle (matches how wide end-fire beams are usually quoted).
double half_power_beamwidth_deg(double steer_deg, const ArrayConfig& config,
                                double scan_step_deg = 0.01);

} // namespace aoa
