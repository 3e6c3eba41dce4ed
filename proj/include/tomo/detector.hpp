#pragma once

#include <string>
#include <vector>

#include "tomo/grid.hpp"
#include "tomo/rng.hpp"

namespace tomo {

/// Sampled detector transfer table: DQE versus frequency as a fraction of
/// Nyquist, linearly interpolated and clamped at the ends.
class DqeCurve {
public:
    static DqeCurve load(const std::string& path);
    static const DqeCurve& bundled();
    /// Identity curve (detector off).
    static DqeCurve flat();

    double at(double frac_nyquist) const;

private:
    std::vector<double> frac_, value_;
};

struct DetectOptions {
    bool apply_dqe = true;
    bool poisson = true;  // off = return expected counts (noiseless)
};

struct DetectStats {
    int64_t clamped_negative = 0;  // pixels clamped to zero after filtering
};

/// Electron counting: intensity |wave|^2 is filtered in Fourier space by
/// sqrt(DQE) normalized to 1 at DC (absolute efficiency is folded into the
/// dose), scaled to expected counts = dose x pixel area, and sampled per pixel
/// from the Poisson distribution. dose is in electrons per square angstrom.
Grid3 detect(const ComplexGrid3& exit_wave, double dose_per_A2, const DqeCurve& dqe, Rng& rng,
             const DetectOptions& opt = {}, DetectStats* stats = nullptr);

}  // namespace tomo
