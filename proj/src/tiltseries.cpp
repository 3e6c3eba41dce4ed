#include "tomo/tiltseries.hpp"

#include <cmath>

#include "tomo/fft.hpp"
#include "tomo/parallel.hpp"

namespace tomo {

namespace {

/// Phase-ramp translation of a 2D complex wave by (dx, dy) nm.
void shift_wave(ComplexGrid3& wave, double dx, double dy) {
    if (dx == 0.0 && dy == 0.0) return;
    ComplexGrid3 spec = dft3(wave);
    const int nx = spec.nx(), ny = spec.ny();
    const double h = spec.voxel_size();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double phase =
                -2.0 * kPi * (fft_freq(i, nx, h) * dx + fft_freq(j, ny, h) * dy);
            spec.at(i, j, 0) *= std::complex<double>(std::cos(phase), std::sin(phase));
        }
    wave = idft3_complex(spec);
}

}  // namespace

Grid3 translate_image(const Grid3& img, double dx_nm, double dy_nm) {
    ComplexGrid3 c(img.nx(), img.ny(), 1, img.voxel_size(), img.origin());
    for (size_t i = 0; i < img.size(); ++i) c[i] = img[i];
    shift_wave(c, dx_nm, dy_nm);
    Grid3 out(img.nx(), img.ny(), 1, img.voxel_size(), img.origin());
    for (size_t i = 0; i < out.size(); ++i) out[i] = c[i].real();
    return out;
}

TiltSeries simulate_tiltseries(const GrandModel& model, const OpticsConfig& optics,
                               const TiltConfig& cfg, uint64_t seed, DetectStats* stats) {
    if (cfg.n_tilts < 1) throw std::invalid_argument("simulate_tiltseries: need n_tilts >= 1");

    TiltSeries ts;
    ts.optics = optics;
    ts.seed = seed;

    const Rng root(seed);
    {
        Rng r = root.substream("defocus");
        ts.defocus_um = r.uniform(cfg.defocus_min_um, cfg.defocus_max_um);
    }
    {
        Rng r = root.substream("dose");
        ts.total_dose = r.uniform(cfg.total_dose_min, cfg.total_dose_max);
    }

    const double step =
        cfg.n_tilts > 1 ? (cfg.tilt_max_deg - cfg.tilt_min_deg) / (cfg.n_tilts - 1) : 0.0;
    const double dose_per_tilt = ts.total_dose / cfg.n_tilts;
    for (int t = 0; t < cfg.n_tilts; ++t) {
        ts.angles_deg.push_back(cfg.tilt_min_deg + step * t);
        ts.per_tilt_dose.push_back(dose_per_tilt);
        Rng r = root.substream("shift", static_cast<uint64_t>(t));
        const double half = cfg.shift_range_nm / 2.0;
        ts.shifts_nm.push_back({r.uniform(-half, half), r.uniform(-half, half)});
    }

    ts.projections.resize(cfg.n_tilts);
    std::vector<DetectStats> tilt_stats(cfg.n_tilts);
    const double defocus_nm = ts.defocus_um * 1.0e3;

    parallel_for(0, cfg.n_tilts, [&](int64_t t) {
        ComplexGrid3 wave =
            multislice_project(model, ts.angles_deg[t], optics, defocus_nm, cfg.apply_ctf);
        shift_wave(wave, ts.shifts_nm[t][0], ts.shifts_nm[t][1]);
        Rng r = root.substream("detect", static_cast<uint64_t>(t));
        DetectOptions dopt;
        dopt.apply_dqe = cfg.apply_dqe;
        dopt.poisson = cfg.poisson;
        ts.projections[t] = detect(wave, ts.per_tilt_dose[t],
                                   cfg.apply_dqe ? DqeCurve::bundled() : DqeCurve::flat(), r,
                                   dopt, &tilt_stats[t]);
    });

    if (stats)
        for (const auto& s : tilt_stats) stats->clamped_negative += s.clamped_negative;
    return ts;
}

}  // namespace tomo
