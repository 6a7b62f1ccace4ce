#include "aoa/signal_sim.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "aoa/rng.hpp"

namespace aoa {

namespace {

// Stream ids for per-frame seed derivation.
constexpr std::uint64_t kNoiseStream = 0x6e6f6973; // 'nois'

static_assert(std::endian::native == std::endian::little,
              "frame container assumes a little-endian host");

} // namespace

BasebandKind baseband_kind_from_string(const std::string& name) {
    if (name == "complex_tone" || name == "tone") return BasebandKind::complex_tone;
    if (name == "linear_chirp" || name == "chirp") return BasebandKind::linear_chirp;
    if (name == "random_qpsk" || name == "qpsk") return BasebandKind::random_qpsk;
    throw config_error("unknown baseband kind: " + name);
}

std::string to_string(BasebandKind kind) {
    switch (kind) {
    case BasebandKind::complex_tone: return "complex_tone";
    case BasebandKind::linear_chirp: return "linear_chirp";
    case BasebandKind::random_qpsk: return "random_qpsk";
    }
    return "unknown";
}

std::vector<cplx> gen_baseband(const SourceSpec& spec, std::size_t length, double sample_rate) {
    if (length == 0) throw std::invalid_argument("baseband length must be positive");
    if (sample_rate <= 0.0) throw std::invalid_argument("sample rate must be positive");

    std::vector<cplx> s(length);
    switch (spec.kind) {
    case BasebandKind::complex_tone: {
        const double w = 2.0 * kPi * spec.tone_offset_hz / sample_rate;
        for (std::size_t n = 0; n < length; ++n)
            s[n] = std::polar(1.0, w * static_cast<double>(n));
        break;
    }
    case BasebandKind::linear_chirp: {
        // Linear sweep from -B/2 to +B/2 across the frame; phase is the
        // integral of the instantaneous frequency.
        const double b = spec.chirp_sweep_hz;
        const double t_total = static_cast<double>(length) / sample_rate;
        for (std::size_t n = 0; n < length; ++n) {
            const double t = static_cast<double>(n) / sample_rate;
            const double phase = 2.0 * kPi * (-b / 2.0) * t + kPi * (b / t_total) * t * t;
            s[n] = std::polar(1.0, phase);
        }
        break;
    }
    case BasebandKind::random_qpsk: {
        if (spec.symbol_rate_hz <= 0.0) throw config_error("qpsk symbol rate must be positive");
        std::size_t sps = static_cast<std::size_t>(std::llround(sample_rate / spec.symbol_rate_hz));
        if (sps == 0) sps = 1;
        Rng rng(Rng::derive(spec.baseband_seed, 0x7170736b)); // 'qpsk'
        cplx symbol = 1.0;
        for (std::size_t n = 0; n < length; ++n) {
            if (n % sps == 0) {
                const double quadrant = kPi / 4.0 + kPi / 2.0 * static_cast<double>(rng.below(4));
                symbol = std::polar(1.0, quadrant);
            }
            s[n] = symbol;
        }
        break;
    }
    }
    return s;
}

IQFrame synthesize_frame(const std::vector<SourceSpec>& sources, const ArrayConfig& config,
                         std::size_t length, std::optional<double> snr_db, double sample_rate,
                         std::uint64_t seed) {
    config.validate();
    if (length == 0) throw std::invalid_argument("frame length must be positive");
    if (sources.size() > 2)
        throw std::invalid_argument("at most two impinging sources are supported");
    if (sources.size() == 2 && sources[0].angle_deg == sources[1].angle_deg)
        throw std::invalid_argument("two-source synthesis needs distinct angles");

    IQFrame frame;
    frame.samples = Matrix<cplx>(static_cast<std::size_t>(config.num_elements), length);
    frame.sample_rate = sample_rate;
    frame.config = config;
    frame.rng_seed = seed;

    for (const SourceSpec& src : sources) {
        if (src.power < 0.0) throw std::invalid_argument("source power must be non-negative");
        const SteeringVector a = steering_vector(src.angle_deg, config);
        const std::vector<cplx> s = gen_baseband(src, length, sample_rate);
        const double amp = std::sqrt(src.power);
        for (std::size_t m = 0; m < frame.num_channels(); ++m) {
            const cplx gain = amp * a.elements[m];
            cplx* row = frame.samples.row(m);
            for (std::size_t n = 0; n < length; ++n) row[n] += gain * s[n];
        }
    }

    if (snr_db) {
        if (sources.empty()) {
            // Noise-only frame: unit reference power, so the requested SNR
            // fixes the noise power directly.
            const double noise_power = std::pow(10.0, -*snr_db / 10.0);
            for (std::size_t m = 0; m < frame.num_channels(); ++m) {
                Rng rng(Rng::derive(Rng::derive(seed, kNoiseStream), m));
                cplx* row = frame.samples.row(m);
                for (std::size_t n = 0; n < length; ++n) row[n] = rng.gaussian_cplx(noise_power);
            }
        } else {
            frame = add_awgn(frame, *snr_db, seed);
        }
    }
    return frame;
}

double mean_sample_power(const IQFrame& frame) {
    if (frame.samples.empty()) throw std::invalid_argument("empty frame");
    double acc = 0.0;
    for (const cplx& v : frame.samples.values()) acc += std::norm(v);
    return acc / static_cast<double>(frame.samples.size());
}

IQFrame add_awgn(const IQFrame& frame, double snr_db, std::uint64_t seed) {
    if (frame.samples.empty()) throw std::invalid_argument("empty frame");
    const double signal_power = mean_sample_power(frame);
    if (!(signal_power > 0.0) || !std::isfinite(signal_power))
        throw numeric_error("frame power is zero or non-finite");
    const double noise_power = signal_power / std::pow(10.0, snr_db / 10.0);

    IQFrame out = frame;
    for (std::size_t m = 0; m < out.num_channels(); ++m) {
        Rng rng(Rng::derive(Rng::derive(seed, kNoiseStream), m));
        cplx* row = out.samples.row(m);
        for (std::size_t n = 0; n < out.num_samples(); ++n) row[n] += rng.gaussian_cplx(noise_power);
    }
    return out;
}

namespace {

constexpr char kFrameMagic[4] = {'A', 'O', 'A', 'F'};
constexpr std::uint32_t kFrameVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw data_error("truncated frame container");
    return v;
}

} // namespace

void save_frame(const IQFrame& frame, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os.write(kFrameMagic, sizeof(kFrameMagic));
    write_pod(os, kFrameVersion);
    write_pod(os, static_cast<std::uint32_t>(frame.num_channels()));
    write_pod(os, static_cast<std::uint64_t>(frame.num_samples()));
    write_pod(os, frame.sample_rate);
    write_pod(os, frame.rng_seed);
    std::vector<float> payload;
    payload.reserve(frame.samples.size() * 2);
    for (std::size_t m = 0; m < frame.num_channels(); ++m) {
        const cplx* row = frame.samples.row(m);
        for (std::size_t n = 0; n < frame.num_samples(); ++n) {
            payload.push_back(static_cast<float>(row[n].real()));
            payload.push_back(static_cast<float>(row[n].imag()));
        }
    }
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!os) throw data_error("failed writing frame container: " + path);
}

IQFrame load_frame(const std::string& path, const ArrayConfig& config) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open frame container: " + path);
    char magic[4];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kFrameMagic, sizeof(magic)) != 0)
        throw data_error("not a frame container: " + path);
    const auto version = read_pod<std::uint32_t>(is);
    if (version != kFrameVersion) throw data_error("unsupported frame container version");
    const auto channels = read_pod<std::uint32_t>(is);
    const auto samples = read_pod<std::uint64_t>(is);
    const auto sample_rate = read_pod<double>(is);
    const auto seed = read_pod<std::uint64_t>(is);
    if (channels != static_cast<std::uint32_t>(config.num_elements))
        throw data_error("frame channel count does not match the array config");

    IQFrame frame;
    frame.samples = Matrix<cplx>(channels, samples);
    frame.sample_rate = sample_rate;
    frame.config = config;
    frame.rng_seed = seed;
    std::vector<float> payload(static_cast<std::size_t>(channels) * samples * 2);
    is.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!is) throw data_error("truncated frame payload: " + path);
    std::size_t k = 0;
    for (std::size_t m = 0; m < frame.num_channels(); ++m) {
        cplx* row = frame.samples.row(m);
        for (std::size_t n = 0; n < frame.num_samples(); ++n, k += 2)
            row[n] = cplx(payload[k], payload[k + 1]);
    }
    return frame;
}

} // namespace aoa
