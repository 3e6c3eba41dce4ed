#include "tomo/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tomo/fft.hpp"
#include "tomo/rng.hpp"

namespace tomo {

namespace {

int ring_of(int i, int j, int nx, int ny, double width, int n_rings) {
    const int kx = (i <= nx / 2) ? i : i - nx;
    const int ky = (j <= ny / 2) ? j : j - ny;
    const double r = std::sqrt(static_cast<double>(kx) * kx + static_cast<double>(ky) * ky);
    const int idx = static_cast<int>(r / width);
    return idx < n_rings ? idx : n_rings - 1;
}

}  // namespace

Grid3 ring_scale(const Grid3& sim, const Grid3& reference, int n_rings, RingScaleReport* report) {
    if (!sim.same_shape(reference))
        throw std::invalid_argument("ring_scale: sim and reference dims differ");
    const int nx = sim.nx(), ny = sim.ny();
    if (sim.nz() != 1) throw std::invalid_argument("ring_scale: expected 2D images");
    if (n_rings <= 0) n_rings = std::max(1, std::min(nx, ny) / 2);
    const double width = (std::min(nx, ny) / 2.0) / n_rings;

    const ComplexGrid3 fs = dft3(sim);
    const ComplexGrid3 fr = dft3(reference);

    std::vector<double> mu_sim(n_rings, 0.0), mu_ref(n_rings, 0.0);
    std::vector<int64_t> count(n_rings, 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int r = ring_of(i, j, nx, ny, width, n_rings);
            mu_sim[r] += std::abs(fs.at(i, j, 0));
            mu_ref[r] += std::abs(fr.at(i, j, 0));
            ++count[r];
        }
    std::vector<double> scale(n_rings, 1.0);
    for (int r = 0; r < n_rings; ++r) {
        if (count[r] == 0) continue;
        const double ms = mu_sim[r] / count[r];
        const double mr = mu_ref[r] / count[r];
        if (ms <= 1e-300) {
            if (report) ++report->zero_rings;
            continue;  // ring passed through unscaled
        }
        scale[r] = mr / ms;
    }

    ComplexGrid3 out = fs;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.at(i, j, 0) *= scale[ring_of(i, j, nx, ny, width, n_rings)];
    return idft3(out);
}

SnrEstimate estimate_snr(const Grid3& tomogram, const IntGrid3& occupancy_mask) {
    if (tomogram.nx() != occupancy_mask.nx() || tomogram.ny() != occupancy_mask.ny() ||
        tomogram.nz() != occupancy_mask.nz())
        throw std::invalid_argument("estimate_snr: mask not aligned with tomogram");

    double sum_bg = 0, sum2_bg = 0;
    int64_t n_bg = 0;
    double sum_all = 0, sum2_all = 0;
    for (size_t i = 0; i < tomogram.size(); ++i) {
        const double v = tomogram[i];
        sum_all += v;
        sum2_all += v * v;
        if (occupancy_mask[i] == 0) {
            sum_bg += v;
            sum2_bg += v * v;
            ++n_bg;
        }
    }
    if (n_bg == 0) throw std::runtime_error("estimate_snr: empty background");

    SnrEstimate e;
    const double n_all = static_cast<double>(tomogram.size());
    const double mean_bg = sum_bg / n_bg;
    const double mean_all = sum_all / n_all;
    e.var_noise = sum2_bg / n_bg - mean_bg * mean_bg;
    e.var_noisy_signal = sum2_all / n_all - mean_all * mean_all;
    e.var_signal = e.var_noisy_signal - e.var_noise;
    if (e.var_signal < 0) {
        e.var_signal = 0;
        e.clamped = true;
    }
    e.snr = e.var_noise > 0 ? e.var_signal / e.var_noise : 0.0;
    return e;
}

Grid3 synthetic_reference(const Grid3& like, const OpticsConfig& optics, double defocus_nm,
                          double power_exponent, uint64_t seed) {
    const int nx = like.nx(), ny = like.ny();
    const double h = like.voxel_size();

    // Random phases with Hermitian symmetry, inherited from a real noise image.
    Rng rng = Rng(seed).substream("reference");
    Grid3 noise(nx, ny, 1, h);
    for (auto& v : noise.data()) v = rng.normal();
    ComplexGrid3 spec = dft3(noise);

    const ComplexGrid3 fl = dft3(like);
    const double dc = std::abs(fl.at(0, 0, 0));
    double energy_like = 0;
    for (size_t i = 1; i < fl.size(); ++i) energy_like += std::norm(fl[i]);

    const double q1 = 1.0 / (nx * h);  // first-bin frequency
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (i == 0 && j == 0) continue;
            const double q = std::hypot(fft_freq(i, nx, h), fft_freq(j, ny, h));
            const double falloff = std::pow(q1 / std::max(q, q1), power_exponent);
            const double thon = 0.3 + 0.7 * std::abs(std::sin(chi(optics, defocus_nm, q)));
            const auto v = spec.at(i, j, 0);
            const double mag = std::abs(v);
            spec.at(i, j, 0) = mag > 0 ? v / mag * falloff * thon : 0.0;
        }
    double energy_ref = 0;
    for (size_t i = 1; i < spec.size(); ++i) energy_ref += std::norm(spec[i]);
    const double gain = energy_ref > 0 ? std::sqrt(energy_like / energy_ref) : 1.0;
    for (size_t i = 1; i < spec.size(); ++i) spec[i] *= gain;
    spec.at(0, 0, 0) = dc;
    return idft3(spec);
}

}  // namespace tomo
