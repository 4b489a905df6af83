#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace ncce {

// Seed mixing / derivation. All randomness in the library flows from 64-bit
// seeds split into independent sub-streams with fixed offsets, so regenerating
// one component (say, the channel) never perturbs another (the ensemble).

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Derive the seed of sub-stream `stream` from a base seed. Deterministic,
/// and well decorrelated for adjacent stream ids.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0xD1B54A32D192ED03ull * (stream + 1));
    return splitmix64(s);
}

// Fixed sub-stream ids (documented part of the reproducibility contract).
namespace streams {
inline constexpr std::uint64_t kEnsembleQuantized = 0; // physical matrix A
inline constexpr std::uint64_t kEnsembleGaussian = 1;  // virtual factor A_CS
inline constexpr std::uint64_t kTrialChannel = 0;
inline constexpr std::uint64_t kTrialEnsemble = 1;
inline constexpr std::uint64_t kTrialNoise = 2;
} // namespace streams

/// Deterministic random source. mt19937_64 is bit-exact across platforms and
/// the distributions below are implemented here (not via <random> adaptors,
/// whose output is implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // 53-bit multiply; bias is negligible for the small n used here.
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// Two uniform bits (used for the {1, j, -1, -j} alphabet).
    unsigned two_bits() { return static_cast<unsigned>(gen_() >> 62); }

    /// Standard normal via Box-Muller (pair cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
        double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// CN(0, 2*sigma_component^2): real and imaginary parts are independent
    /// N(0, sigma_component^2).
    std::complex<double> complex_gaussian(double sigma_component) {
        double re = sigma_component * gaussian();
        double im = sigma_component * gaussian();
        return {re, im};
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ncce
