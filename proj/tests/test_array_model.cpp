#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aoa/array_model.hpp"
#include "aoa/rng.hpp"

using namespace aoa;

namespace {

ArrayConfig make_config(int m, double alpha) {
    ArrayConfig c;
    c.num_elements = m;
    c.spacing_factor = alpha;
    return c;
}

} // namespace

TEST_CASE("wave number") {
    CHECK(wave_number(1.0) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(wave_number(0.34552) == doctest::Approx(18.186).epsilon(1e-4));
    CHECK(wave_number(2.0 * kPi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(wave_number(0.0), std::invalid_argument);
    CHECK_THROWS_AS(wave_number(-1.0), std::invalid_argument);
}

TEST_CASE("element positions") {
    ArrayConfig c = make_config(4, 0.2);
    c.wavelength = 1.0;
    const auto y = element_positions(c);
    REQUIRE(y.size() == 4);
    CHECK(y[0] == doctest::Approx(0.0));
    CHECK(y[1] == doctest::Approx(0.2));
    CHECK(y[2] == doctest::Approx(0.4));
    CHECK(y[3] == doctest::Approx(0.6));

    ArrayConfig c2 = make_config(2, 0.5);
    c2.wavelength = 2.0;
    const auto y2 = element_positions(c2);
    CHECK(y2[0] == doctest::Approx(0.0));
    CHECK(y2[1] == doctest::Approx(1.0));

    ArrayConfig bad = make_config(1, 0.2);
    CHECK_THROWS_AS(element_positions(bad), std::invalid_argument);
}

TEST_CASE("steering vector values") {
    const ArrayConfig c4 = make_config(4, 0.2);
    const SteeringVector broadside = steering_vector(0.0, c4);
    for (const cplx& e : broadside.elements) {
        CHECK(e.real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(e.imag() == doctest::Approx(0.0).epsilon(1e-15));
    }

    // theta=30, M=2, alpha=0.5: phase = 2*pi*0.5*sin(30 deg) = pi/2 -> -j
    const ArrayConfig c2 = make_config(2, 0.5);
    const SteeringVector sv = steering_vector(30.0, c2);
    CHECK(sv.elements[0] == cplx(1.0, 0.0));
    CHECK(sv.elements[1].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sv.elements[1].imag() == doctest::Approx(-1.0).epsilon(1e-12));

    const SteeringVector mirror = steering_vector(-30.0, c2);
    CHECK(mirror.elements[1].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mirror.elements[1].imag() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(steering_vector(91.0, c4), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector(-90.5, c4), std::invalid_argument);
}

TEST_CASE("steering vector properties") {
    const ArrayConfig c = make_config(4, 0.2);
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = rng.uniform(-90.0, 90.0);
        const SteeringVector sv = steering_vector(theta, c);
        const SteeringVector conj_sv = steering_vector(-theta, c);
        CHECK(sv.elements[0] == cplx(1.0, 0.0));
        for (std::size_t m = 0; m < sv.elements.size(); ++m) {
            CHECK(std::abs(sv.elements[m]) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(conj_sv.elements[m] - std::conj(sv.elements[m])) < 1e-12);
        }
    }
}

TEST_CASE("array factor main lobe") {
    const ArrayConfig c = make_config(4, 0.25);
    const auto at_steer = array_factor_db(17.0, {17.0}, c);
    CHECK(at_steer[0] == doctest::Approx(0.0).epsilon(1e-12));

    // argmax over a 0.1 deg grid lands on the steering angle
    std::vector<double> grid;
    for (double a = -90.0; a <= 90.0; a += 0.1) grid.push_back(a);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double steer = rng.uniform(-60.0, 60.0);
        const auto pattern = array_factor_db(steer, grid, c);
        std::size_t best = 0;
        for (std::size_t i = 1; i < pattern.size(); ++i)
            if (pattern[i] > pattern[best]) best = i;
        CHECK(std::abs(grid[best] - steer) <= 0.1 + 1e-9);
    }

    CHECK_THROWS_AS(array_factor_db(0.0, {}, c), std::invalid_argument);
}

TEST_CASE("half power beamwidth") {
    const ArrayConfig c = make_config(4, 0.25);
    const double bw0 = half_power_beamwidth_deg(0.0, c);
    const double bw60 = half_power_beamwidth_deg(60.0, c);
    CHECK(bw0 == doctest::Approx(54.0).epsilon(0.02));
    CHECK(bw60 == doctest::Approx(132.0).epsilon(0.02));
    CHECK(bw60 > bw0);
}
