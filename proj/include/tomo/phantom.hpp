#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tomo/euler.hpp"
#include "tomo/potential.hpp"
#include "tomo/rng.hpp"

namespace tomo {

struct ParticleInstance {
    std::string class_id;
    Vec3 center;  // physical nm in the grandmodel frame
    EulerZXZ orientation;
    int instance_id = 0;  // 1-based; equals the line number in the ground-truth export
};

/// Ground-truth sample volume: potential of everything placed (ice constants
/// included), plus voxel-to-class and voxel-to-instance masks.
struct GrandModel {
    PotentialMap potential;
    IntGrid3 class_mask;      // 0 = background, else 1-based index into class_names
    IntGrid3 occupancy_mask;  // 0 = background, else instance_id
    std::vector<ParticleInstance> instances;
    std::vector<std::string> class_names;
    uint64_t rng_seed = 0;
    double recon_voxel_nm = 1.0;  // frame of exported coordinates
    double ice_potential_V = 4.530;  // background level, also fills rotated corners
    double ice_absorption = 0.208;

    int class_index(const std::string& id) const;  // 1-based, 0 if absent
};

struct CatalogEntry {
    std::string class_id;
    PotentialMap potential;
    MoleculeKind kind = MoleculeKind::Protein;
};
using Catalog = std::vector<CatalogEntry>;

struct PlacementConfig {
    double box_nm = 128.0;       // cubic extent of the grandmodel
    double voxel_nm = 0.5;       // grandmodel sampling (oversampled vs recon)
    double recon_voxel_nm = 1.0;
    int protein_min = 1000, protein_max = 3000;
    int fiducial_min = 7, fiducial_max = 14;
    int vesicle_min = 2, vesicle_max = 7;
    double fiducial_radius_nm = 5.0;
    double vesicle_radius_min_nm = 10.0, vesicle_radius_max_nm = 20.0;
    double vesicle_wall_nm = 5.0;
    double gold_potential_V = 25.0;     // elastic excess over ice
    double membrane_potential_V = 1.8;  // elastic excess over ice
    int max_attempts = 1000;            // per particle
    double ice_potential_V = 4.530;
    double ice_absorption = 0.208;
    double footprint_threshold = 0.5;   // occupancy boundary, fraction of peak
};

/// Draw counts, orientations and positions, rejecting placements whose
/// thresholded footprints overlap anything already placed; then add the
/// amorphous-ice background constants. Deterministic given the seed.
/// `catalog` holds the protein classes; fiducials and vesicles are synthesized
/// from the config. Throws if a particle cannot be placed within max_attempts.
GrandModel place_particles(const Catalog& catalog, const PlacementConfig& cfg, uint64_t seed);

/// Uniform rotation via uniform unit quaternion, returned in ZXZ angles.
EulerZXZ sample_so3(Rng& rng);

/// One line per instance in instance_id order:
/// `class x y z phi theta psi`, coordinates in voxels of the reconstruction frame.
std::string export_ground_truth(const GrandModel& model);

struct GroundTruthEntry {
    std::string class_id;
    Vec3 position;  // voxel coordinates, reconstruction frame
    EulerZXZ orientation;
};
std::vector<GroundTruthEntry> parse_ground_truth(const std::string& text);

/// Downsample a label mask by block mode; ties prefer the nonzero label.
IntGrid3 bin_labels(const IntGrid3& mask, int factor);

}  // namespace tomo
