#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tomo/bench.hpp"
#include "tomo/matcher.hpp"
#include "tomo/phantom.hpp"
#include "tomo/recon.hpp"
#include "tomo/spectral.hpp"
#include "tomo/tiltseries.hpp"

namespace tomo {

/// One catalog entry as configured: a structure file or a procedural stand-in.
struct CatalogItemConfig {
    std::string class_id;
    std::string kind = "pdb";  // pdb | xyz | blob
    std::string path;          // structure file for pdb/xyz
    int blob_atoms = 300;      // procedural pseudo-protein
    double blob_radius_A = 15.0;
    uint64_t blob_seed = 7;
};

struct SimulateConfig {
    PlacementConfig placement;
    OpticsConfig optics;
    TiltConfig tilt;
    ReconConfig recon;
    std::vector<CatalogItemConfig> catalog;
    bool ring_scale = true;
    double ring_power = 1.5;
    uint64_t seed = 1;
};

struct SimulateOutputs {
    std::string grandmodel_mrc, absorption_mrc;
    std::string class_mask_mrc, occupancy_mask_mrc;  // reconstruction frame
    std::string ground_truth_txt;
    std::string tilt_stack_mrc, tilt_meta_json;
    std::string tomogram_mrc;
    std::string snr_json;
    std::string config_json;
    SnrEstimate snr;
    int placed_particles = 0;
};

/// Build the catalog for the configured items (structure files parsed, blobs
/// synthesized deterministically).
Catalog build_catalog(const std::vector<CatalogItemConfig>& items, double voxel_nm);

/// phantom -> imaging -> spectral -> recon, writing every artifact under outdir.
/// Byte-identical outputs for identical configs and seeds.
SimulateOutputs run_simulate(const SimulateConfig& cfg, const std::string& outdir);

/// Reconstruct a stack previously written by run_simulate.
std::string run_reconstruct(const std::string& stack_mrc, const std::string& meta_json,
                            const ReconConfig& cfg, const std::string& outdir);

struct MatchConfig {
    std::string tomogram_path;
    std::vector<CatalogItemConfig> catalog;  // classes to search
    bool overlap_filter = false;             // TM-F
    double angular_step_deg = 30.0;
    int top_n = 100;                         // candidates kept per class and handedness
    double exclusion_radius_vox = 0;         // 0 = template mask radius
    bool detect_fiducials = true;
    double log_sigma_vox = 5.0;
    BuildTemplateOptions template_options;
};

struct MatchOutputs {
    std::string predictions_txt;
    std::string timing_json;
    std::vector<Candidate> accepted;
};

MatchOutputs run_match(const MatchConfig& cfg, const std::string& outdir);

struct EvaluateConfig {
    std::string predictions_path;
    std::string ground_truth_path;
    std::string occupancy_path;  // MRC labels; empty enables the radius matcher
    std::vector<std::string> exclusions;
    double fallback_radius_vox = 0;
};

struct EvaluateOutputs {
    std::string report_txt;
    std::string report_json;
    MatchReport report;
    Metrics global;
};

EvaluateOutputs run_evaluate(const EvaluateConfig& cfg, const std::string& outdir);

/// Procedural pseudo-protein: a deterministic cluster of light atoms inside a
/// ball, useful where no structure files are available.
std::vector<AtomRecord> synthetic_blob_atoms(int n_atoms, double radius_A, uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace tomo
