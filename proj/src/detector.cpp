#include "tomo/detector.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tomo/datadir.hpp"
#include "tomo/fft.hpp"

namespace tomo {

DqeCurve DqeCurve::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("DqeCurve: cannot open " + path);
    DqeCurve c;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double x, y;
        ls >> x >> y;
        if (!ls) throw std::runtime_error("DqeCurve: malformed row '" + line + "'");
        if (!c.frac_.empty() && x <= c.frac_.back())
            throw std::runtime_error("DqeCurve: frequencies must increase");
        c.frac_.push_back(x);
        c.value_.push_back(y);
    }
    if (c.frac_.size() < 2) throw std::runtime_error("DqeCurve: need at least two samples");
    return c;
}

const DqeCurve& DqeCurve::bundled() {
    static const DqeCurve c = load(data_file("dqe_k2summit.txt"));
    return c;
}

DqeCurve DqeCurve::flat() {
    DqeCurve c;
    c.frac_ = {0.0, 1.0};
    c.value_ = {1.0, 1.0};
    return c;
}

double DqeCurve::at(double x) const {
    if (x <= frac_.front()) return value_.front();
    if (x >= frac_.back()) return value_.back();
    size_t i = 1;
    while (frac_[i] < x) ++i;
    const double t = (x - frac_[i - 1]) / (frac_[i] - frac_[i - 1]);
    return value_[i - 1] + t * (value_[i] - value_[i - 1]);
}

Grid3 detect(const ComplexGrid3& exit_wave, double dose_per_A2, const DqeCurve& dqe, Rng& rng,
             const DetectOptions& opt, DetectStats* stats) {
    if (exit_wave.nz() != 1) throw std::invalid_argument("detect: expected a 2D wave");
    const int nx = exit_wave.nx(), ny = exit_wave.ny();
    const double h = exit_wave.voxel_size();

    Grid3 intensity(nx, ny, 1, h, exit_wave.origin());
    for (size_t i = 0; i < intensity.size(); ++i) intensity[i] = std::norm(exit_wave[i]);

    if (opt.apply_dqe) {
        ComplexGrid3 spec = dft3(intensity);
        const double q_nyq = 1.0 / (2.0 * h);
        const double dc_gain = std::sqrt(dqe.at(0.0));
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double q = std::hypot(fft_freq(i, nx, h), fft_freq(j, ny, h));
                spec.at(i, j, 0) *= std::sqrt(dqe.at(q / q_nyq)) / dc_gain;
            }
        intensity = idft3(spec);
    }

    const double pixel_area_A2 = (h * 10.0) * (h * 10.0);
    const double scale = dose_per_A2 * pixel_area_A2;
    Grid3 counts(nx, ny, 1, h, exit_wave.origin());
    for (size_t i = 0; i < counts.size(); ++i) {
        double expected = scale * intensity[i];
        if (expected < 0.0) {
            expected = 0.0;
            if (stats) ++stats->clamped_negative;
        }
        counts[i] = opt.poisson ? static_cast<double>(rng.poisson(expected)) : expected;
    }
    return counts;
}

}  // namespace tomo
