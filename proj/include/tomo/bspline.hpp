#pragma once

#include "tomo/euler.hpp"
#include "tomo/grid.hpp"

namespace tomo {

/// Cubic B-spline interpolation coefficients (recursive prefilter, mirror
/// boundaries) for the given samples.
Grid3 bspline_prefilter(const Grid3& g);

/// Evaluate prefiltered coefficients at a continuous voxel index (0 .. n-1 is
/// the sample range); taps outside the grid are mirrored.
double bspline_eval(const Grid3& coeffs, double x, double y, double z);

/// Resample `g` rotated by `r` about the physical point `center`, on the same
/// grid. Values are interpolated with prefiltered cubic B-splines; source
/// positions outside the input extent take `fill`. Rotation moves the object:
/// a feature at p ends up at center + R (p - center). Throws on non-finite input.
Grid3 rotate_bspline(const Grid3& g, const EulerZXZ& r, const Vec3& center, double fill = 0.0);
Grid3 rotate_bspline(const Grid3& g, const Mat3& rot, const Vec3& center, double fill = 0.0);

}  // namespace tomo
