#pragma once

#include <map>
#include <string>
#include <vector>

#include "tomo/euler.hpp"
#include "tomo/optics.hpp"
#include "tomo/potential.hpp"

namespace tomo {

enum class Handedness { Normal, Flipped };

struct TemplateSpec {
    std::string class_id;
    Grid3 volume;  // at the tomogram sampling, CTF-modulated, low-passed
    Grid3 mask;    // spherical, gaussian-smoothed edge, encompasses the template
    double mask_radius_nm = 0;
    Handedness handedness = Handedness::Normal;
};

struct BuildTemplateOptions {
    double defocus_um = 3.65;
    double lowpass_nm = 4.0;       // gaussian low-pass cutoff (resolution)
    double target_voxel_nm = 1.0;  // tomogram sampling
    OpticsConfig optics;
};

/// CTF-modulate and low-pass the electrostatic potential, resampled to the
/// tomogram grid; returns both handedness variants (the flipped copy mirrors x).
std::pair<TemplateSpec, TemplateSpec> build_template(const std::string& class_id,
                                                     const PotentialMap& potential,
                                                     const BuildTemplateOptions& opt = {});

struct Candidate {
    std::string class_id;
    std::array<int, 3> position{};  // voxel
    int orientation = -1;           // index into the searched orientation list
    double score = 0.0;
    Handedness handedness = Handedness::Normal;
};

struct NccResult {
    Grid3 scores;             // per-voxel max over orientations, in [-1, 1]
    IntGrid3 best_orientation;  // argmax index (ties to the lower index)
};

/// Masked, locally normalized cross-correlation over the full volume, per
/// orientation via Fourier correlation (circular boundary), with the per-voxel
/// max kept. The local mean and variance are taken under the mask; the score
/// at voxel p corresponds to the template centered there. Zero local variance
/// scores 0. The mask must be spherically symmetric (it is not rotated).
NccResult ncc_search(const Grid3& tomogram, const Grid3& tmpl, const Grid3& mask,
                     const std::vector<EulerZXZ>& orientations);

/// Greedy non-maximum suppression: repeatedly take the global score maximum
/// and zero a sphere of exclusion_radius around it, until n candidates are
/// collected or the scores are exhausted (no voxel above min_score remains;
/// suppressed regions and zero-variance voxels never become candidates).
/// Ties break toward the lower flat index.
std::vector<Candidate> extract_candidates(const NccResult& result, const std::string& class_id,
                                          int n, double exclusion_radius_vox,
                                          Handedness handedness = Handedness::Normal,
                                          double min_score = 0.0);

/// Merge candidate lists across handedness: coincident positions keep the
/// higher score; the result is sorted by descending score.
std::vector<Candidate> merge_candidates(const std::vector<Candidate>& a,
                                        const std::vector<Candidate>& b);

struct ScoreThreshold {
    double mu = 0;
    double sigma = 0;
    double cutoff = 0;  // mu - 2 sigma
    bool fallback = false;  // degenerate fit, sample statistics used
};

/// Fit one Gaussian to the highest-count mode of the 50-bin score histogram
/// (weighted log-parabola least squares); cutoff = mu - 2 sigma. Degenerate
/// fits fall back to sample statistics over the mode window. Needs >= 20 scores.
ScoreThreshold fit_threshold(const std::vector<double>& scores, int n_bins = 50);

/// Histogram fit when the candidate population is large enough for one,
/// otherwise the sample-statistics fallback (mu - 2 sigma over all scores).
ScoreThreshold threshold_scores(const std::vector<double>& scores);

/// Drop candidates scoring below the cutoff (boundary kept).
std::vector<Candidate> apply_threshold(const std::vector<Candidate>& candidates, double cutoff);

/// TM-F overlap post-filter: classes processed in the given priority order
/// (descending score within a class); a candidate is dropped when its center
/// lies strictly within r_self + r_accepted of an already accepted particle.
/// Radii are per class, in voxels.
std::vector<Candidate> overlap_filter(const std::vector<Candidate>& candidates,
                                      const std::map<std::string, double>& radius_by_class_vox,
                                      const std::vector<std::string>& class_order);

struct LogDetectOptions {
    double sigma_vox = 5.0;
    double min_response_frac = 0.3;  // of the global response maximum
    bool bright_blobs = true;        // tomograms here carry dense material as positive
};

/// Laplacian-of-Gaussian blob detection; returns local-maximum positions of
/// the (sign-adjusted) response above the relative threshold.
std::vector<std::array<int, 3>> log_fiducial_detect(const Grid3& tomogram,
                                                    const LogDetectOptions& opt = {});

/// Quasi-uniform orientation grid: theta rows stepped by `step_deg` with the
/// phi count scaled by sin(theta), psi stepped uniformly. Includes identity.
std::vector<EulerZXZ> so3_grid(double step_deg);

/// Prediction-list text: `class x y z score`, one line per candidate.
std::string format_predictions(const std::vector<Candidate>& candidates);

}  // namespace tomo
