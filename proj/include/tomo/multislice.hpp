#pragma once

#include "tomo/optics.hpp"
#include "tomo/phantom.hpp"

namespace tomo {

/// Exit wave of the model viewed at one tilt angle (rotation about y, beam
/// along z). The model is rotated with prefiltered B-splines (corners filled
/// with the ice background), partitioned into slices of optics.slice_thickness
/// along the beam, and the wave is alternately transmitted and Fresnel
/// propagated; the complex pupil is applied once at the image plane.
///
/// Transmission per slice: t = exp(i sigma (V_el + i V_ab) dz), one relativistic
/// interaction constant for both parts (complex-potential convention).
/// Throws if the slice thickness is not an integer multiple of the voxel size.
ComplexGrid3 multislice_project(const GrandModel& model, double tilt_deg,
                                const OpticsConfig& optics, double defocus_nm,
                                bool apply_ctf = true);

}  // namespace tomo
