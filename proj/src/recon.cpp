#include "tomo/recon.hpp"

#include <cmath>
#include <stdexcept>

#include "tomo/fft.hpp"
#include "tomo/parallel.hpp"

namespace tomo {

namespace {

/// Fourier profile of the length-D ray smear: Dirichlet kernel, 1 at f = 0.
double ray_smear(double f, double extent, int n_samples) {
    const double a = kPi * f * extent;
    if (std::abs(a) < 1e-12) return 1.0;
    const double denom = n_samples * std::sin(a / n_samples);
    if (std::abs(denom) < 1e-12) return 1.0;
    return std::abs(std::sin(a) / denom);
}

Grid3 filter_projection(const Grid3& proj, ReconConfig::Weighting weighting, double angle_deg,
                        const std::vector<double>& all_angles_deg) {
    if (weighting == ReconConfig::Weighting::None) return proj;
    ComplexGrid3 spec = dft3(proj);
    const int nx = spec.nx(), ny = spec.ny();
    const double h = spec.voxel_size();
    const double q_nyq = 1.0 / (2.0 * h);
    const double extent = nx * h;

    // Exact weighting: divide each frequency by the summed overlap of every
    // backprojected ray sheet at that point of this projection's Fourier slice.
    std::vector<double> exact_w(nx, 1.0);
    if (weighting == ReconConfig::Weighting::Exact) {
        for (int i = 0; i < nx; ++i) {
            const double qx = std::abs(fft_freq(i, nx, h));
            double overlap = 0.0;
            for (double other : all_angles_deg)
                overlap += ray_smear(qx * std::sin(deg2rad(other - angle_deg)), extent, nx);
            exact_w[i] = 1.0 / overlap;
        }
    }

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double qx = std::abs(fft_freq(i, nx, h));
            const double qy = std::abs(fft_freq(j, ny, h));
            const double w = weighting == ReconConfig::Weighting::Exact ? exact_w[i] : qx;
            // Hann rolloff against noise amplification; radial in the image
            // plane so the in-plane transfer stays isotropic
            const double fr = std::min(1.0, std::hypot(qx, qy) / q_nyq);
            spec.at(i, j, 0) *= w * 0.5 * (1.0 + std::cos(kPi * fr));
        }
    return idft3(spec);
}

}  // namespace

Grid3 normalize_projection(const Grid3& counts) {
    const double m = mean_value(counts);
    Grid3 out = counts;
    if (m != 0.0)
        for (auto& v : out.data()) v = -(v / m - 1.0);
    return out;
}

Grid3 weighted_backprojection(const TiltSeries& ts, const ReconConfig& cfg) {
    if (ts.projections.empty()) throw std::invalid_argument("weighted_backprojection: empty series");
    const size_t n_tilts = ts.projections.size();
    if (ts.angles_deg.size() != n_tilts)
        throw std::invalid_argument("weighted_backprojection: angles/projections mismatch");

    std::vector<Grid3> prepared(n_tilts);
    parallel_for(0, static_cast<int64_t>(n_tilts), [&](int64_t t) {
        Grid3 p = ts.projections[t];
        if (cfg.align_shifts && t < static_cast<int64_t>(ts.shifts_nm.size()))
            p = translate_image(p, -ts.shifts_nm[t][0], -ts.shifts_nm[t][1]);
        p = filter_projection(p, cfg.weighting, ts.angles_deg[t], ts.angles_deg);
        if (cfg.bin_factor > 1) p = bin(p, cfg.bin_factor);
        prepared[t] = std::move(p);
    });

    const int pnx = prepared[0].nx();
    const int pny = prepared[0].ny();
    const double ph = prepared[0].voxel_size();
    int onx = cfg.output_dims[0] > 0 ? cfg.output_dims[0] : pnx;
    int ony = cfg.output_dims[1] > 0 ? cfg.output_dims[1] : pny;
    int onz = cfg.output_dims[2] > 0 ? cfg.output_dims[2] : pnx;

    Grid3 out(onx, ony, onz, ph);

    std::vector<double> cos_t(n_tilts), sin_t(n_tilts);
    for (size_t t = 0; t < n_tilts; ++t) {
        cos_t[t] = std::cos(deg2rad(ts.angles_deg[t]));
        sin_t[t] = std::sin(deg2rad(ts.angles_deg[t]));
    }

    // Per-voxel accumulation over tilts in fixed order: deterministic under
    // any thread count.
    parallel_for(0, onz, [&](int64_t kk) {
        const int k = static_cast<int>(kk);
        const double z = (k + 0.5) * ph - 0.5 * onz * ph;
        for (int j = 0; j < ony; ++j) {
            const double y = (j + 0.5) * ph - 0.5 * ony * ph;
            const double pv = y / ph + 0.5 * pny - 0.5;
            const int jv = static_cast<int>(std::floor(pv));
            const double fy = pv - jv;
            for (int i = 0; i < onx; ++i) {
                const double x = (i + 0.5) * ph - 0.5 * onx * ph;
                double acc = 0.0;
                for (size_t t = 0; t < n_tilts; ++t) {
                    const double u = cos_t[t] * x + sin_t[t] * z;
                    const double pu = u / ph + 0.5 * pnx - 0.5;
                    const int iu = static_cast<int>(std::floor(pu));
                    if (iu < 0 || iu + 1 >= pnx || jv < 0 || jv + 1 >= pny) continue;
                    const double fx = pu - iu;
                    const Grid3& p = prepared[t];
                    acc += (1 - fx) * (1 - fy) * p.at(iu, jv, 0) +
                           fx * (1 - fy) * p.at(iu + 1, jv, 0) +
                           (1 - fx) * fy * p.at(iu, jv + 1, 0) +
                           fx * fy * p.at(iu + 1, jv + 1, 0);
                }
                out.at(i, j, k) = acc / static_cast<double>(n_tilts);
            }
        }
    });
    return out;
}

}  // namespace tomo
