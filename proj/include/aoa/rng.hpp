#pragma once

#include <cmath>
#include <cstdint>

#include "aoa/common.hpp"

namespace aoa {

// Deterministic splitmix64 generator. The <random> distributions are
// implementation-defined, which would break byte-identical dataset
// reproduction across toolchains, so every random draw in the pipeline
// goes through this fixed stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Independent stream seed, e.g. per record, per channel, per batch.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        return mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via the Marsaglia-Tsang ziggurat; exact distribution,
    // one table lookup on the fast path.
    double gaussian() {
        const ZigguratTables& z = ziggurat();
        for (;;) {
            const std::uint64_t bits = next_u64();
            const auto hz = static_cast<std::int32_t>(bits >> 32);
            const std::size_t iz = static_cast<std::size_t>(hz) & 127u;
            if (static_cast<std::uint32_t>(hz < 0 ? -static_cast<std::int64_t>(hz) : hz) <
                z.kn[iz])
                return hz * z.wn[iz];

            if (iz == 0) {
                // tail beyond the base layer
                double x, y;
                do {
                    x = -std::log(uniform_open()) / kZigguratR;
                    y = -std::log(uniform_open());
                } while (y + y < x * x);
                return hz > 0 ? kZigguratR + x : -kZigguratR - x;
            }
            const double x = hz * z.wn[iz];
            if (z.fn[iz] + uniform() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x))
                return x;
        }
    }

    cplx gaussian_cplx(double power) {
        const double s = std::sqrt(power * 0.5);
        return {s * gaussian(), s * gaussian()};
    }

private:
    static constexpr double kZigguratR = 3.442619855899;

    struct ZigguratTables {
        std::uint32_t kn[128];
        double wn[128];
        double fn[128];
    };

    static const ZigguratTables& ziggurat() {
        static const ZigguratTables tables = [] {
            ZigguratTables z;
            const double m1 = 2147483648.0;
            double dn = kZigguratR, tn = dn;
            const double vn = 9.91256303526217e-3;
            const double q = vn / std::exp(-0.5 * dn * dn);
            z.kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
            z.kn[1] = 0;
            z.wn[0] = q / m1;
            z.wn[127] = dn / m1;
            z.fn[0] = 1.0;
            z.fn[127] = std::exp(-0.5 * dn * dn);
            for (int i = 126; i >= 1; --i) {
                dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
                z.kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
                tn = dn;
                z.fn[i] = std::exp(-0.5 * dn * dn);
                z.wn[i] = dn / m1;
            }
            return z;
        }();
        return tables;
    }

    // uniform in (0, 1]; safe operand for log
    double uniform_open() { return 1.0 - uniform(); }

    std::uint64_t state_;
};

// Fisher-Yates with the fixed generator; std::shuffle is unspecified.
template <typename Container>
void deterministic_shuffle(Container& c, Rng& rng) {
    for (std::size_t i = c.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(c[i - 1], c[j]);
    }
}

} // namespace aoa
