#pragma once

#include "tomo/grid.hpp"

namespace tomo {

/// Microscope parameters. Defaults follow a 300 kV instrument with a direct
/// detector; lengths are carried in the units indicated by each name.
struct OpticsConfig {
    double voltage_kV = 300.0;
    double spherical_aberration_mm = 2.7;
    double chromatic_aberration_mm = 2.7;      // feeds the temporal envelope
    double energy_spread_eV = 0.7;
    double illumination_aperture_urad = 30.0;  // source semi-angle
    double objective_diameter_um = 100.0;
    double focal_distance_mm = 4.7;
    double defocus_um = 3.5;  // positive = underfocus
    double astigmatism = 0.0;
    double slice_thickness_nm = 5.0;
    double pixel_size_nm = 0.5;

    /// Relativistic electron wavelength, nm (about 1.97e-3 at 300 kV).
    double wavelength_nm() const;
    /// Interaction constant sigma_e, rad / (V nm):
    /// sigma = 2 pi / (lambda U) * (m0 c^2 + e U) / (2 m0 c^2 + e U).
    double interaction_constant() const;
    double defocus_nm() const { return defocus_um * 1.0e3; }
    double cs_nm() const { return spherical_aberration_mm * 1.0e6; }
};

/// Aberration phase chi(q) = pi lambda q^2 dz - (pi/2) Cs lambda^3 q^4,
/// q in 1/nm, defocus in nm (positive = underfocus).
double chi(const OpticsConfig& o, double defocus_nm, double q);

/// Temporal-coherence envelope from the chromatic focus spread
/// delta = Cc * dE/E:  exp(-(pi lambda delta q^2)^2 / (16 ln 2)).
double temporal_envelope(const OpticsConfig& o, double q);

/// Spatial-coherence envelope for a Gaussian source of semi-angle alpha:
/// exp(-(pi alpha / lambda)^2 (Cs lambda^3 q^3 - dz lambda q)^2 / ln 2).
double spatial_envelope(const OpticsConfig& o, double defocus_nm, double q);

/// Hard objective-aperture cutoff frequency (1/nm): (d/2) / (f lambda).
double aperture_cutoff(const OpticsConfig& o);

/// Phase CTF at one frequency: sin(chi) damped by both envelopes and the
/// aperture. This is the curve used for template modulation and analysis.
double ctf_value(const OpticsConfig& o, double defocus_nm, double q);

/// 2D phase-CTF filter over the FFT frequency layout of an nx x ny image.
Grid3 ctf_filter_2d(int nx, int ny, double pixel_nm, const OpticsConfig& o, double defocus_nm);

/// Complex pupil E(q) exp(-i chi(q)) on the same layout; multiplying the exit
/// wave spectrum by this applies the objective lens.
ComplexGrid3 pupil_filter_2d(int nx, int ny, double pixel_nm, const OpticsConfig& o,
                             double defocus_nm);

}  // namespace tomo
