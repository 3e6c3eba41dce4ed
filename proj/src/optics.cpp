#include "tomo/optics.hpp"

#include <cmath>

#include "tomo/euler.hpp"
#include "tomo/fft.hpp"

namespace tomo {

namespace {
constexpr double kElectronRestEnergy_eV = 510998.95;
}

double OpticsConfig::wavelength_nm() const {
    const double U = voltage_kV * 1.0e3;  // volts
    // lambda = h c / sqrt(eU (2 m0 c^2 + eU))
    return 1.2264263 / std::sqrt(U * (1.0 + U / (2.0 * kElectronRestEnergy_eV)));
}

double OpticsConfig::interaction_constant() const {
    const double U = voltage_kV * 1.0e3;
    const double rel = (kElectronRestEnergy_eV + U) / (2.0 * kElectronRestEnergy_eV + U);
    return 2.0 * kPi / (wavelength_nm() * U) * rel;
}

double chi(const OpticsConfig& o, double defocus_nm, double q) {
    const double lam = o.wavelength_nm();
    const double q2 = q * q;
    return kPi * lam * q2 * defocus_nm - 0.5 * kPi * o.cs_nm() * lam * lam * lam * q2 * q2;
}

double temporal_envelope(const OpticsConfig& o, double q) {
    const double lam = o.wavelength_nm();
    const double focus_spread =
        o.chromatic_aberration_mm * 1.0e6 * (o.energy_spread_eV / (o.voltage_kV * 1.0e3));
    const double t = kPi * lam * focus_spread * q * q;
    return std::exp(-t * t / (16.0 * std::log(2.0)));
}

double spatial_envelope(const OpticsConfig& o, double defocus_nm, double q) {
    const double lam = o.wavelength_nm();
    const double alpha = o.illumination_aperture_urad * 1.0e-6;
    const double grad = o.cs_nm() * lam * lam * lam * q * q * q - defocus_nm * lam * q;
    const double t = kPi * alpha / lam * grad;
    return std::exp(-t * t / std::log(2.0));
}

double aperture_cutoff(const OpticsConfig& o) {
    const double theta_max = (o.objective_diameter_um * 1.0e3 / 2.0) / (o.focal_distance_mm * 1.0e6);
    return theta_max / o.wavelength_nm();
}

double ctf_value(const OpticsConfig& o, double defocus_nm, double q) {
    if (q > aperture_cutoff(o)) return 0.0;
    return std::sin(chi(o, defocus_nm, q)) * temporal_envelope(o, q) *
           spatial_envelope(o, defocus_nm, q);
}

Grid3 ctf_filter_2d(int nx, int ny, double pixel_nm, const OpticsConfig& o, double defocus_nm) {
    Grid3 f(nx, ny, 1, pixel_nm);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double qx = fft_freq(i, nx, pixel_nm);
            const double qy = fft_freq(j, ny, pixel_nm);
            f.at(i, j, 0) = ctf_value(o, defocus_nm, std::hypot(qx, qy));
        }
    return f;
}

ComplexGrid3 pupil_filter_2d(int nx, int ny, double pixel_nm, const OpticsConfig& o,
                             double defocus_nm) {
    ComplexGrid3 f(nx, ny, 1, pixel_nm);
    const double qcut = aperture_cutoff(o);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double qx = fft_freq(i, nx, pixel_nm);
            const double qy = fft_freq(j, ny, pixel_nm);
            const double q = std::hypot(qx, qy);
            if (q > qcut) {
                f.at(i, j, 0) = 0.0;
                continue;
            }
            const double env = temporal_envelope(o, q) * spatial_envelope(o, defocus_nm, q);
            const double x = chi(o, defocus_nm, q);
            // e^{+i chi}: with the e^{+i phase} transmission and e^{-i pi lambda
            // q^2 dz} propagator used in the multislice, positive defocus
            // (underfocus) then darkens dense material, I = 1 - 2 sin(chi) E * phi.
            f.at(i, j, 0) = std::complex<double>(env * std::cos(x), env * std::sin(x));
        }
    return f;
}

}  // namespace tomo
