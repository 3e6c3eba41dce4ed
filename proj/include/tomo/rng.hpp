#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tomo {

/// Deterministic random stream. The mt19937_64 engine is specified by the
/// standard; the variate transforms below are our own so that sequences do not
/// depend on the standard library implementation. All randomness in the
/// pipeline flows from one user seed through named substreams.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    /// Derive an independent substream for (tag, index). splitmix64 over the
    /// mixed key decorrelates nearby seeds.
    Rng substream(std::string_view tag, uint64_t index = 0) const;

    uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive (rejection-free modulo with
    /// negligible bias for the small ranges used here).
    int64_t uniform_int(int64_t lo, int64_t hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int64_t>(eng_() % span);
    }

    /// Standard normal via Box-Muller; second variate is cached.
    double normal();

    /// Poisson sample. Knuth product method below lambda = 30, normal
    /// approximation with rounding above (adequate for count images and
    /// deterministic given the stream).
    int64_t poisson(double lambda);

private:
    explicit Rng(std::mt19937_64 eng) : eng_(eng) {}
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

uint64_t splitmix64(uint64_t x);

}  // namespace tomo
