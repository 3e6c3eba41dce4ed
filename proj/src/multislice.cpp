#include "tomo/multislice.hpp"

#include <cmath>
#include <stdexcept>

#include "tomo/bspline.hpp"
#include "tomo/fft.hpp"

namespace tomo {

namespace {

/// Fresnel free-space propagation by dz: spectrum times exp(-i pi lambda q^2 dz).
void propagate(ComplexGrid3& wave, double lambda_nm, double dz_nm) {
    ComplexGrid3 spec = dft3(wave);
    const int nx = spec.nx(), ny = spec.ny();
    const double h = spec.voxel_size();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double qx = fft_freq(i, nx, h);
            const double qy = fft_freq(j, ny, h);
            const double phase = -kPi * lambda_nm * (qx * qx + qy * qy) * dz_nm;
            spec.at(i, j, 0) *= std::complex<double>(std::cos(phase), std::sin(phase));
        }
    wave = idft3_complex(spec);
}

}  // namespace

ComplexGrid3 multislice_project(const GrandModel& model, double tilt_deg,
                                const OpticsConfig& optics, double defocus_nm, bool apply_ctf) {
    const Grid3& el = model.potential.v_el;
    const double h = el.voxel_size();
    const double ratio = optics.slice_thickness_nm / h;
    const int slice_vox = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - slice_vox) > 1e-9 || slice_vox < 1)
        throw std::invalid_argument(
            "multislice_project: slice thickness must be a positive integer multiple of the "
            "voxel size");

    // Background constants fill the clipped corners so the ice layer stays intact.
    const double ice_el = model.ice_potential_V;
    const double ice_ab = model.ice_absorption;
    const Mat3 rot = tilt_about_y(tilt_deg).matrix();
    const Vec3 c = el.box_center();
    const Grid3 rot_el = rotate_bspline(el, rot, c, ice_el);
    const Grid3 rot_ab = rotate_bspline(model.potential.v_ab, rot, c, ice_ab);

    const int nx = el.nx(), ny = el.ny(), nz = el.nz();
    const double lambda = optics.wavelength_nm();
    const double sigma = optics.interaction_constant();

    ComplexGrid3 wave(nx, ny, 1, h);
    wave.fill({1.0, 0.0});

    for (int z0 = 0; z0 < nz; z0 += slice_vox) {
        const int z1 = std::min(nz, z0 + slice_vox);
        const double dz = (z1 - z0) * h;
        // projected potential of the slab
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double p_el = 0.0, p_ab = 0.0;
                for (int k = z0; k < z1; ++k) {
                    p_el += rot_el.at(i, j, k);
                    p_ab += rot_ab.at(i, j, k);
                }
                const double phase = sigma * p_el * h;
                const double damp = std::exp(-sigma * p_ab * h);
                wave.at(i, j, 0) *=
                    damp * std::complex<double>(std::cos(phase), std::sin(phase));
            }
        propagate(wave, lambda, dz);
    }

    if (apply_ctf) {
        ComplexGrid3 spec = dft3(wave);
        const ComplexGrid3 pupil = pupil_filter_2d(nx, ny, h, optics, defocus_nm);
        for (size_t i = 0; i < spec.size(); ++i) spec[i] *= pupil[i];
        wave = idft3_complex(spec);
    }
    return wave;
}

}  // namespace tomo
