#pragma once

#include "concrisk/mathx.hpp"

#include <array>
#include <cmath>
#include <cstdint>

namespace concrisk {

// philox4x32-10 block function. Counter-based so that scenario k always sees
// the same draw sequence no matter how scenarios are distributed over
// threads: the stream for scenario k is keyed by (seed, k) and advances a
// local block counter only.
struct Philox {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> c,
                                              std::array<std::uint32_t, 2> k) {
        constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(m0) * c[0];
            const std::uint64_t p1 = std::uint64_t(m1) * c[2];
            const std::array<std::uint32_t, 4> n = {
                std::uint32_t(p1 >> 32) ^ c[1] ^ k[0],
                std::uint32_t(p1),
                std::uint32_t(p0 >> 32) ^ c[3] ^ k[1],
                std::uint32_t(p0),
            };
            c = n;
            k[0] += w0;
            k[1] += w1;
        }
        return c;
    }
};

// One scenario's substream: uniforms in (0,1) with 53 significant bits,
// standard normals by quantile inversion, gamma/beta by Marsaglia-Tsang.
class ScenarioStream {
  public:
    // mirror reflects every uniform to 1-u (antithetic counterpart stream)
    ScenarioStream(std::uint64_t seed, std::uint64_t scenario, bool mirror = false)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          scen_lo_(std::uint32_t(scenario)),
          scen_hi_(std::uint32_t(scenario >> 32)),
          mirror_(mirror) {}

    double uniform() {
        if (have_ == 0) refill();
        const std::uint32_t hi = buf_[--have_];
        const std::uint32_t lo = buf_[--have_];
        const std::uint64_t u53 = (std::uint64_t(hi) << 21) | (lo >> 11);
        const double u = (double(u53) + 0.5) * 0x1p-53;
        return mirror_ ? 1.0 - u : u;
    }

    double normal() { return normal_quantile(uniform()); }

    // Gamma(shape, 1); shape < 1 boosted through Gamma(shape+1).
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

  private:
    void refill() {
        buf_ = Philox::block({std::uint32_t(block_), std::uint32_t(block_ >> 32),
                              scen_lo_, scen_hi_},
                             key_);
        ++block_;
        have_ = 4;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t scen_lo_, scen_hi_;
    bool mirror_ = false;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace concrisk
