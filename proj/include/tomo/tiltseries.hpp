#pragma once

#include <array>
#include <vector>

#include "tomo/detector.hpp"
#include "tomo/multislice.hpp"
#include "tomo/optics.hpp"
#include "tomo/phantom.hpp"

namespace tomo {

/// Projection stack with per-tilt acquisition metadata. Projections hold
/// electron counts at the optics pixel size.
struct TiltSeries {
    std::vector<Grid3> projections;
    std::vector<double> angles_deg;
    std::vector<std::array<double, 2>> shifts_nm;  // applied x/y translations
    std::vector<double> per_tilt_dose;             // e- / A^2
    OpticsConfig optics;
    double defocus_um = 0;  // drawn once per model
    double total_dose = 0;
    uint64_t seed = 0;
};

struct TiltConfig {
    int n_tilts = 61;
    double tilt_min_deg = -60.0, tilt_max_deg = 60.0;
    double defocus_min_um = 2.0, defocus_max_um = 5.0;
    double total_dose_min = 100.0, total_dose_max = 120.0;  // e- / A^2, whole series
    /// "1 nm range" read as a total range: U(-range/2, +range/2) per axis.
    double shift_range_nm = 1.0;
    bool apply_ctf = true;
    bool apply_dqe = true;
    bool poisson = true;
};

/// Simulate the full series: evenly spaced angles, per-model defocus and total
/// dose drawn uniformly, the dose split equally per tilt, random per-tilt
/// shifts applied as image translations. Fully deterministic given the seed;
/// tilts run on independent substreams and may execute in parallel.
TiltSeries simulate_tiltseries(const GrandModel& model, const OpticsConfig& optics,
                               const TiltConfig& cfg, uint64_t seed,
                               DetectStats* stats = nullptr);

/// Translate a 2D image by (dx, dy) nm via the Fourier shift theorem (periodic).
Grid3 translate_image(const Grid3& img, double dx_nm, double dy_nm);

}  // namespace tomo
