#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "aoa/covariance.hpp"
#include "aoa/music.hpp"
#include "aoa/signal_sim.hpp"
#include "test_support.hpp"

using namespace aoa;

namespace {

SourceSpec tone_at(double angle_deg, double offset_hz = 0.0) {
    SourceSpec s;
    s.angle_deg = angle_deg;
    s.kind = BasebandKind::complex_tone;
    s.tone_offset_hz = offset_hz;
    return s;
}

} // namespace

TEST_CASE("baseband generators") {
    SourceSpec tone = tone_at(0.0, 0.0);
    const auto s_tone = gen_baseband(tone, 64, 2e6);
    for (const cplx& v : s_tone) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);

    SourceSpec chirp;
    chirp.kind = BasebandKind::linear_chirp;
    const auto s_chirp = gen_baseband(chirp, 8, 2e6);
    for (const cplx& v : s_chirp) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));

    SourceSpec qpsk;
    qpsk.kind = BasebandKind::random_qpsk;
    qpsk.baseband_seed = 42;
    const auto a = gen_baseband(qpsk, 4096, 2e6);
    const auto b = gen_baseband(qpsk, 4096, 2e6);
    CHECK(a == b);
    for (const cplx& v : a) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
    qpsk.baseband_seed = 43;
    const auto c = gen_baseband(qpsk, 4096, 2e6);
    CHECK(a != c);

    CHECK_THROWS_AS(gen_baseband(tone, 0, 2e6), std::invalid_argument);
}

TEST_CASE("unit average power") {
    Rng rng(11);
    for (BasebandKind kind :
         {BasebandKind::complex_tone, BasebandKind::linear_chirp, BasebandKind::random_qpsk}) {
        SourceSpec s;
        s.kind = kind;
        s.tone_offset_hz = 12.5e3;
        s.baseband_seed = rng.next_u64();
        const auto seq = gen_baseband(s, 4096, 2e6);
        double p = 0.0;
        for (const cplx& v : seq) p += std::norm(v);
        p /= static_cast<double>(seq.size());
        CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("broadside source hits all channels identically") {
    const ArrayConfig config;
    const IQFrame frame = synthesize_frame({tone_at(0.0, 10e3)}, config, 512, std::nullopt, 2e6, 1);
    for (std::size_t m = 1; m < frame.num_channels(); ++m)
        for (std::size_t n = 0; n < frame.num_samples(); ++n)
            CHECK(std::abs(frame.samples(m, n) - frame.samples(0, n)) < 1e-12);
}

TEST_CASE("noise-only frame matches requested power") {
    const ArrayConfig config;
    const IQFrame frame = synthesize_frame({}, config, kDefaultFrameLength, 0.0, 2e6, 9);
    // snr 0 dB against the unit reference -> noise power 1 per channel
    for (std::size_t m = 0; m < frame.num_channels(); ++m) {
        double p = 0.0;
        for (std::size_t n = 0; n < frame.num_samples(); ++n) p += std::norm(frame.samples(m, n));
        p /= static_cast<double>(frame.num_samples());
        CHECK(p == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("two-source synthesis is linear") {
    const ArrayConfig config;
    SourceSpec s1 = tone_at(-30.0, 20e3);
    SourceSpec s2;
    s2.angle_deg = 30.0;
    s2.kind = BasebandKind::random_qpsk;
    s2.baseband_seed = 5;

    const IQFrame both = synthesize_frame({s1, s2}, config, 2048, std::nullopt, 2e6, 77);
    const IQFrame only1 = synthesize_frame({s1}, config, 2048, std::nullopt, 2e6, 77);
    const IQFrame only2 = synthesize_frame({s2}, config, 2048, std::nullopt, 2e6, 77);
    for (std::size_t i = 0; i < both.samples.size(); ++i)
        CHECK(std::abs(both.samples.data()[i] - only1.samples.data()[i] - only2.samples.data()[i]) <
              1e-12);
}

TEST_CASE("synthesis preconditions") {
    const ArrayConfig config;
    CHECK_THROWS_AS(synthesize_frame({tone_at(0), tone_at(10), tone_at(20)}, config, 64,
                                     std::nullopt, 2e6, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(synthesize_frame({tone_at(10), tone_at(10)}, config, 64, std::nullopt, 2e6, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(synthesize_frame({}, config, 0, std::nullopt, 2e6, 1), std::invalid_argument);
}

TEST_CASE("awgn snr calibration and determinism") {
    const ArrayConfig config;
    const IQFrame clean = synthesize_frame({tone_at(12.0, 15e3)}, config, kDefaultFrameLength,
                                           std::nullopt, 2e6, 3);
    const IQFrame noisy = add_awgn(clean, 0.0, 21);
    double noise_power = 0.0;
    for (std::size_t i = 0; i < clean.samples.size(); ++i)
        noise_power += std::norm(noisy.samples.data()[i] - clean.samples.data()[i]);
    noise_power /= static_cast<double>(clean.samples.size());
    CHECK(noise_power == doctest::Approx(mean_sample_power(clean)).epsilon(0.05));

    const IQFrame again = add_awgn(clean, 0.0, 21);
    CHECK(noisy.samples == again.samples);
    const IQFrame other = add_awgn(clean, 0.0, 22);
    CHECK(noisy.samples != other.samples);

    IQFrame empty;
    CHECK_THROWS_AS(add_awgn(empty, 0.0, 1), std::invalid_argument);
}

TEST_CASE("noiseless single-source covariance has rank 1") {
    const ArrayConfig config;
    SourceSpec src;
    src.angle_deg = 25.0;
    src.kind = BasebandKind::random_qpsk;
    src.baseband_seed = 8;
    const IQFrame frame = synthesize_frame({src}, config, kDefaultFrameLength, std::nullopt, 2e6, 4);
    const CovarianceStack stack = stack_covariances(frame);
    const Eigendecomposition eig = eigendecompose_hermitian(average_covariance(stack));
    const double top = eig.eigenvalues.back();
    for (std::size_t i = 0; i + 1 < eig.eigenvalues.size(); ++i)
        CHECK(std::abs(eig.eigenvalues[i]) <= 1e-9 * top);
}

TEST_CASE("frame container round trip") {
    const ArrayConfig config;
    SourceSpec src = tone_at(-12.0, 31e3);
    IQFrame frame = synthesize_frame({src}, config, 1024, 10.0, 2e6, 123);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "aoa_frame_test.bin").string();
    const std::string path2 = (dir / "aoa_frame_test_resave.bin").string();
    save_frame(frame, path);
    const IQFrame loaded = load_frame(path, config);
    CHECK(loaded.sample_rate == frame.sample_rate);
    CHECK(loaded.rng_seed == frame.rng_seed);
    REQUIRE(loaded.samples.rows() == frame.samples.rows());
    REQUIRE(loaded.samples.cols() == frame.samples.cols());
    // payload is float32: values agree to single precision and a second
    // save/load cycle is exact
    std::size_t close = 0;
    for (std::size_t i = 0; i < frame.samples.size(); ++i) {
        const double err = std::abs(loaded.samples.data()[i] - frame.samples.data()[i]);
        if (err <= 1e-6 * (1.0 + std::abs(frame.samples.data()[i]))) ++close;
    }
    CHECK(close == frame.samples.size());
    save_frame(loaded, path2);
    const IQFrame again = load_frame(path2, config);
    CHECK(again.samples == loaded.samples);
    std::remove(path.c_str());
    std::remove(path2.c_str());

    CHECK_THROWS_AS(load_frame("/nonexistent/frame.bin", config), data_error);
}
