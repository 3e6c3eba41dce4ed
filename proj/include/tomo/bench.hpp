#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tomo/grid.hpp"
#include "tomo/phantom.hpp"

namespace tomo {

struct PredictionEntry {
    std::string class_id;
    Vec3 position{};  // voxel coordinates, reconstruction frame
    double score = 0.0;
    bool has_score = false;
};

struct PredictionSet {
    std::vector<PredictionEntry> entries;
    std::string source;
};

/// `class x y z [score]` per line; '#' starts a comment.
PredictionSet parse_predictions(const std::string& text, const std::string& source = "");
std::string format_predictions(const PredictionSet& preds);

/// Ground truth for matching: instance list (1-based ids equal line order) and
/// the occupancy mask in the same frame as the predictions.
struct BenchGroundTruth {
    std::vector<GroundTruthEntry> entries;
    IntGrid3 occupancy;  // 0 = background, else instance id

    const std::string& class_of(int instance_id) const {
        return entries[static_cast<size_t>(instance_id) - 1].class_id;
    }
};

struct MatchOptions {
    std::vector<std::string> exclusions;  // classes removed from both sides
    /// > 0 switches to the radius matcher (nearest center within this many
    /// voxels). Non-canonical; for datasets without occupancy masks.
    double fallback_radius_vox = 0.0;
};

struct MatchReport {
    int64_t rr = 0;  // results counted after exclusions
    int64_t tp = 0;  // unique particles found
    int64_t fp = 0;  // predictions on background (or out of bounds)
    int64_t fn = 0;  // particles never hit
    int64_t mh = 0;  // particles with more than one hit
    int64_t extra_hits = 0;  // predictions beyond the first per particle; rr == tp + fp + extra
    int64_t total_particles = 0;  // tp + fn
    double ad = 0;  // mean euclidean center distance over first hits, voxels
    /// Per input prediction: instance id, 0 = background, -1 = excluded/discarded.
    std::vector<int> assignment;
    std::vector<std::string> warnings;
    /// (true class or "" for background, predicted class) per counted prediction.
    std::vector<std::pair<std::string, std::string>> hit_pairs;
};

/// Assign each prediction through the occupancy mask: background is FP, the
/// first hit of an instance is TP, further hits are extra (MH counts the
/// affected particles). Excluded classes vanish from both sides; predictions
/// landing on excluded particles are discarded entirely.
MatchReport match_predictions(const PredictionSet& preds, const BenchGroundTruth& gt,
                              const MatchOptions& opt = {});

struct Metrics {
    double precision = 0;
    double recall = 0;
    double miss_rate = 0;
    double f1 = 0;
};

/// Eq-style metric arithmetic. recall = TP / total (total_particles < 0 uses
/// TP + FN); precision = TP / RR, defined 0 when RR = 0; miss = 1 - recall.
Metrics compute_metrics(int64_t rr, int64_t tp, int64_t fn, int64_t total_particles = -1);
Metrics compute_metrics(const MatchReport& report);

struct PerClassResult {
    int64_t rr = 0, tp = 0, fn = 0;
    int64_t gt_count = 0;
    std::optional<Metrics> metrics;  // empty when the class is absent from gt
};

/// Per-class restriction of the metrics; a hit only counts for a class when
/// the predicted class matches the instance class.
std::map<std::string, PerClassResult> per_class_results(const PredictionSet& preds,
                                                        const BenchGroundTruth& gt,
                                                        const MatchOptions& opt = {});

/// Molecular weights (kDa) keyed by class; classes without a weight (fiducials)
/// belong to no size group.
class ClassWeights {
public:
    static ClassWeights load(const std::string& path);
    static const ClassWeights& bundled();

    std::optional<double> weight(const std::string& class_id) const;
    double r_eff_nm(const std::string& class_id) const;
    /// Classes sorted ascending by weight; weightless classes go last.
    std::vector<std::string> order_by_weight(const std::vector<std::string>& classes) const;

private:
    std::map<std::string, std::pair<double, double>> rows_;  // weight (nan = none), r_eff
};

struct GroupF1 {
    double small = 0, medium = 0, large = 0;
    int n_small = 0, n_medium = 0, n_large = 0;
};

/// Mean per-class F1 within the weight buckets small < 200, medium 200-600,
/// large > 600 kDa. Classes without metrics or weight are skipped.
GroupF1 group_f1(const std::map<std::string, double>& f1_by_class, const ClassWeights& weights);

struct ConfusionMatrix {
    std::vector<std::string> classes;  // columns; ordered by molecular weight
    /// rows: one per class (true class of the matched instance) plus a final
    /// background row for false positives; columns follow `classes`.
    std::vector<std::vector<int64_t>> counts;

    int64_t at(const std::string& true_class, const std::string& predicted) const;
};

ConfusionMatrix confusion_matrix(const PredictionSet& preds, const BenchGroundTruth& gt,
                                 const MatchOptions& opt = {},
                                 const ClassWeights& weights = ClassWeights::bundled());

/// Running sum of per-class F1 in the given class order.
std::vector<std::pair<std::string, double>> cumulative_f1(
    const std::map<std::string, double>& f1_by_class, const std::vector<std::string>& order);

/// One published localization-table row, for re-derivation checks.
struct PublishedRow {
    std::string method;
    int64_t rr = 0, tp = 0, fp = 0, fn = 0, mh = 0;
    double ad = 0, recall = 0, precision = 0, miss_rate = 0, f1 = 0;
};

struct RowCheck {
    Metrics derived;
    std::vector<std::string> inconsistencies;  // cells that disagree with the arithmetic
};

/// Recompute a published row's metrics from its raw columns (recall uses the
/// stated ground-truth particle count) and flag printed cells that violate the
/// defining equations, e.g. a miss rate that is not 1 - recall.
RowCheck check_published_row(const PublishedRow& row, int64_t total_particles,
                             double tolerance = 1e-3);

}  // namespace tomo
