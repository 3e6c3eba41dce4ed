#pragma once

#include "tomo/grid.hpp"
#include "tomo/optics.hpp"

namespace tomo {

struct RingScaleReport {
    int zero_rings = 0;  // rings passed through unscaled because mu_sim was 0
};

/// Scale the Fourier amplitudes of `sim` ring by ring to the mean amplitudes
/// of `reference`; phases are preserved exactly. Rings are concentric integer
/// annuli that partition every frequency bin exactly once (corner bins join
/// the outermost ring). n_rings = 0 picks one-pixel-wide rings to Nyquist.
Grid3 ring_scale(const Grid3& sim, const Grid3& reference, int n_rings = 0,
                 RingScaleReport* report = nullptr);

struct SnrEstimate {
    double var_noise = 0;
    double var_noisy_signal = 0;
    double var_signal = 0;  // noisy-signal variance minus noise variance
    double snr = 0;
    bool clamped = false;  // negative signal variance clamped to 0
};

/// Variance-ratio SNR: noise variance from background voxels (mask == 0),
/// noisy-signal variance over all voxels. Raises if the background is empty.
SnrEstimate estimate_snr(const Grid3& tomogram, const IntGrid3& occupancy_mask);

/// Synthetic stand-in for an experimental reference image: power-law radial
/// amplitude with Thon-ring modulation and random phases. DC and total non-DC
/// energy are matched to `like`, so ring scaling against it reshapes the
/// spectrum without changing gross intensity.
Grid3 synthetic_reference(const Grid3& like, const OpticsConfig& optics, double defocus_nm,
                          double power_exponent, uint64_t seed);

}  // namespace tomo
