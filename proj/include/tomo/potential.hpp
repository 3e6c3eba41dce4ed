#pragma once

#include <string>
#include <vector>

#include "tomo/grid.hpp"
#include "tomo/pdb.hpp"
#include "tomo/scattering.hpp"

namespace tomo {

/// Paired elastic (volts) and absorptive (dimensionless) potential volumes of
/// one molecule or one assembled grandmodel.
struct PotentialMap {
    Grid3 v_el;
    Grid3 v_ab;

    double voxel_size() const { return v_el.voxel_size(); }
};

struct PotentialOptions {
    double voxel_size_nm = 0.5;    // 5 A sampling
    double ice_potential_V = 4.530;
    bool solvent_exclusion = true;
    double gaussian_cutoff_A = 5.0;   // per-atom truncation, error < 0.1% of peak
    double exclusion_edge_A = 1.0;    // erf edge width of the solvent sphere
    double margin_A = 10.0;           // box margin beyond the atom bounding box
};

/// Electrostatic potential: per atom the five-Gaussian sum, minus a smooth
/// solvent-exclusion sphere of the atom's Van der Waals radius scaled by the
/// ice potential. The grid is auto-sized to the atoms' bounding box plus
/// margin. Unknown elements raise listing the offending symbols.
Grid3 electrostatic_potential(const std::vector<AtomRecord>& atoms, const ScatteringTable& table,
                              const PotentialOptions& opt = {});

enum class MoleculeKind { Protein, Membrane, Gold, Ice };
const char* to_string(MoleculeKind k);

/// Kind-specific absorption constant times the shape mask (mask values in [0,1]).
Grid3 absorption_potential(MoleculeKind kind, const Grid3& shape_mask,
                           const AbsorptionConstants& constants = AbsorptionConstants::bundled());

/// Full molecule potential from a structure file: elastic part plus an
/// absorption part over the normalized positive density.
PotentialMap molecule_potential(const std::vector<AtomRecord>& atoms,
                                const ScatteringTable& table, MoleculeKind kind,
                                const PotentialOptions& opt = {});

/// Solid sphere with an erf-smoothed boundary, used for gold fiducials.
/// `amplitude` is the elastic potential excess over ice in volts.
PotentialMap sphere_potential(double radius_nm, double amplitude_V, double voxel_size_nm,
                              MoleculeKind kind, double edge_nm = 0.3);

/// Spherical shell (vesicle membrane) of the given outer radius and wall
/// thickness with a smooth profile. The paper gives no membrane model; this is
/// a configurable approximation.
PotentialMap vesicle_potential(double radius_nm, double wall_nm, double amplitude_V,
                               double voxel_size_nm);

}  // namespace tomo
