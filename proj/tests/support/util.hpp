#pragma once

#include <cmath>

#include "tomo/grid.hpp"
#include "tomo/rng.hpp"

namespace testutil {

inline tomo::Grid3 random_grid(int nx, int ny, int nz, uint64_t seed, double voxel = 1.0) {
    tomo::Rng rng(seed);
    tomo::Grid3 g(nx, ny, nz, voxel);
    for (auto& v : g.data()) v = rng.uniform(-1.0, 1.0);
    return g;
}

/// Smooth band-limited field: a few random low-frequency cosines.
inline tomo::Grid3 smooth_grid(int n, uint64_t seed, double voxel = 1.0) {
    tomo::Rng rng(seed);
    tomo::Grid3 g(n, n, n, voxel);
    const int waves = 5;
    double kx[waves], ky[waves], kz[waves], ph[waves], amp[waves];
    for (int w = 0; w < waves; ++w) {
        kx[w] = rng.uniform(-2, 2) * 2 * M_PI / n;
        ky[w] = rng.uniform(-2, 2) * 2 * M_PI / n;
        kz[w] = rng.uniform(-2, 2) * 2 * M_PI / n;
        ph[w] = rng.uniform(0, 2 * M_PI);
        amp[w] = rng.uniform(0.2, 1.0);
    }
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double v = 0;
                for (int w = 0; w < waves; ++w)
                    v += amp[w] * std::cos(kx[w] * i + ky[w] * j + kz[w] * k + ph[w]);
                g.at(i, j, k) = v;
            }
    return g;
}

inline double max_abs_diff(const tomo::Grid3& a, const tomo::Grid3& b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testutil
