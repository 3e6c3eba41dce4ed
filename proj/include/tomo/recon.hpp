#pragma once

#include "tomo/tiltseries.hpp"

namespace tomo {

struct ReconConfig {
    enum class Weighting { Ramp, Exact, None };
    Weighting weighting = Weighting::Ramp;
    int bin_factor = 2;
    /// 0 = cube derived from the binned projection width.
    std::array<int, 3> output_dims = {0, 0, 0};
    /// Subtract the recorded per-tilt shifts before filtering. Leaving this
    /// off keeps the misalignment in, degrading the reconstruction.
    bool align_shifts = true;
};

/// Weighted back-projection with the tilt axis along y. Each projection is
/// shift-aligned, filtered along x in Fourier space (ramp with a Hann rolloff
/// at Nyquist; "exact" weights by the inverse Fourier-slice multiplicity, so
/// low frequencies keep a 1/n_tilts floor instead of vanishing), binned, and
/// smeared back along its ray with bilinear interpolation. The output is
/// normalized by the tilt count. Linear in the projections.
Grid3 weighted_backprojection(const TiltSeries& ts, const ReconConfig& cfg);

/// Contrast preparation for count images ahead of reconstruction:
/// p -> -(p / mean(p) - 1), making dense material positive in the tomogram.
Grid3 normalize_projection(const Grid3& counts);

}  // namespace tomo
