#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cacheic {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-independent seed derivation: each (seed, a, b, c) tuple maps to its
// own stream, so parallel trials stay reproducible regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t x = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
    x = splitmix64(x ^ a);
    x = splitmix64(x ^ b);
    x = splitmix64(x ^ c);
    return x;
}

// mt19937_64 plus hand-rolled Box-Muller.  std::normal_distribution is
// implementation-defined, which would break byte-identical replay across
// standard libraries; everything here is fully pinned.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed), have_spare_(false), spare_(0.0) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on (0,1); never returns an exact 0 or 1.
    double uniform01() {
        return (double(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Standard circularly-symmetric complex Gaussian, E|z|^2 = 1.
    std::complex<double> complex_normal() {
        double re = normal();
        double im = normal();
        return std::complex<double>(re * M_SQRT1_2, im * M_SQRT1_2);
    }

    // Area-uniform draw from the annulus lo <= |z| <= hi.
    std::complex<double> annulus(double lo, double hi) {
        double r = std::sqrt(uniform(lo * lo, hi * hi));
        double t = 2.0 * M_PI * uniform01();
        return std::polar(r, t);
    }

    bool bit() { return (gen_() >> 63) != 0; }

  private:
    std::mt19937_64 gen_;
    bool have_spare_;
    double spare_;
};

} // namespace cacheic
