#include "tomo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tomo {

namespace {

/// Smooth unit-height sphere indicator: 1 inside radius R, erf rolloff of the
/// given edge width across the boundary.
inline double smooth_sphere(double r, double radius, double edge) {
    return 0.5 * (1.0 - std::erf((r - radius) / edge));
}

constexpr double kPotentialPrefactor = 47.878;  // h^2 / (2 pi m0 e), V A^2

/// Mean of the atom's five-Gaussian potential over a voxel box given the
/// atom-relative corner coordinates (angstrom). Point sampling would miss the
/// sub-angstrom peaks at a 5 A grid, so each Gaussian is integrated exactly
/// via the separable erf antiderivative.
double gaussian_voxel_mean(const ElementFactors& ef, const double lo[3], double h_A) {
    double v = 0.0;
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < 5; ++i) {
        const double w = 4.0 * M_PI / ef.b[i];
        const double s = 2.0 * M_PI / std::sqrt(ef.b[i]);
        double prod = 1.0;
        for (int d = 0; d < 3; ++d)
            prod *= sqrt_pi / (2.0 * s * h_A) *
                    (std::erf(s * (lo[d] + h_A)) - std::erf(s * lo[d]));
        v += ef.a[i] * w * std::sqrt(w) * prod;
    }
    return kPotentialPrefactor * v;
}

/// Midpoint-supersampled voxel mean of the solvent-exclusion sphere.
double exclusion_voxel_mean(const double lo[3], double h_A, double radius, double edge) {
    constexpr int n = 3;
    double sum = 0.0;
    for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b)
            for (int a = 0; a < n; ++a) {
                const double x = lo[0] + (a + 0.5) * h_A / n;
                const double y = lo[1] + (b + 0.5) * h_A / n;
                const double z = lo[2] + (c + 0.5) * h_A / n;
                sum += smooth_sphere(std::sqrt(x * x + y * y + z * z), radius, edge);
            }
    return sum / (n * n * n);
}

}  // namespace

const char* to_string(MoleculeKind k) {
    switch (k) {
        case MoleculeKind::Protein: return "protein";
        case MoleculeKind::Membrane: return "membrane";
        case MoleculeKind::Gold: return "gold";
        case MoleculeKind::Ice: return "ice";
    }
    return "?";
}

Grid3 electrostatic_potential(const std::vector<AtomRecord>& atoms, const ScatteringTable& table,
                              const PotentialOptions& opt) {
    std::set<std::string> unknown;
    for (const auto& a : atoms)
        if (!table.covers(a.element)) unknown.insert(a.element);
    if (!unknown.empty()) {
        std::string msg = "electrostatic_potential: unknown elements:";
        for (const auto& e : unknown) msg += " " + e;
        throw std::runtime_error(msg);
    }

    const double h_A = opt.voxel_size_nm * 10.0;  // work in angstrom
    double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    if (!atoms.empty()) {
        lo[0] = hi[0] = atoms[0].x;
        lo[1] = hi[1] = atoms[0].y;
        lo[2] = hi[2] = atoms[0].z;
        for (const auto& a : atoms) {
            lo[0] = std::min(lo[0], a.x); hi[0] = std::max(hi[0], a.x);
            lo[1] = std::min(lo[1], a.y); hi[1] = std::max(hi[1], a.y);
            lo[2] = std::min(lo[2], a.z); hi[2] = std::max(hi[2], a.z);
        }
    }
    int dims[3];
    double origin_A[3];
    for (int d = 0; d < 3; ++d) {
        origin_A[d] = lo[d] - opt.margin_A;
        dims[d] = std::max(1, static_cast<int>(std::ceil((hi[d] - lo[d] + 2 * opt.margin_A) / h_A)));
    }

    Grid3 g(dims[0], dims[1], dims[2], opt.voxel_size_nm,
            {origin_A[0] / 10.0, origin_A[1] / 10.0, origin_A[2] / 10.0});

    const double diag = std::sqrt(3.0) * h_A;
    for (const auto& atom : atoms) {
        const ElementFactors& ef = table.factors(atom.element);
        const double excl_reach = opt.solvent_exclusion
                                      ? ef.vdw_radius + 4.0 * opt.exclusion_edge_A
                                      : 0.0;
        const double reach = std::max(opt.gaussian_cutoff_A, excl_reach) + diag;
        const int ri = static_cast<int>(std::ceil(reach / h_A)) + 1;

        // voxel containing the atom
        const int ci = static_cast<int>(std::floor((atom.x - origin_A[0]) / h_A));
        const int cj = static_cast<int>(std::floor((atom.y - origin_A[1]) / h_A));
        const int ck = static_cast<int>(std::floor((atom.z - origin_A[2]) / h_A));

        for (int k = std::max(0, ck - ri); k <= std::min(g.nz() - 1, ck + ri); ++k)
            for (int j = std::max(0, cj - ri); j <= std::min(g.ny() - 1, cj + ri); ++j)
                for (int i = std::max(0, ci - ri); i <= std::min(g.nx() - 1, ci + ri); ++i) {
                    // atom-relative voxel corner
                    const double lo[3] = {origin_A[0] + i * h_A - atom.x,
                                          origin_A[1] + j * h_A - atom.y,
                                          origin_A[2] + k * h_A - atom.z};
                    const double dx = lo[0] + 0.5 * h_A;
                    const double dy = lo[1] + 0.5 * h_A;
                    const double dz = lo[2] + 0.5 * h_A;
                    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                    double v = 0.0;
                    if (r <= opt.gaussian_cutoff_A + diag) v += gaussian_voxel_mean(ef, lo, h_A);
                    if (opt.solvent_exclusion && r <= excl_reach + diag)
                        v -= opt.ice_potential_V *
                             exclusion_voxel_mean(lo, h_A, ef.vdw_radius, opt.exclusion_edge_A);
                    g.at(i, j, k) += atom.occupancy * v;
                }
    }
    return g;
}

Grid3 absorption_potential(MoleculeKind kind, const Grid3& shape_mask,
                           const AbsorptionConstants& constants) {
    const double c = constants.value(to_string(kind));
    Grid3 out = shape_mask;
    for (auto& v : out.data()) v *= c;
    return out;
}

PotentialMap molecule_potential(const std::vector<AtomRecord>& atoms,
                                const ScatteringTable& table, MoleculeKind kind,
                                const PotentialOptions& opt) {
    PotentialMap pm;
    pm.v_el = electrostatic_potential(atoms, table, opt);
    Grid3 mask = pm.v_el;
    const double peak = max_value(mask);
    if (peak > 0)
        for (auto& v : mask.data()) v = std::clamp(v / peak, 0.0, 1.0);
    else
        mask.fill(0.0);
    pm.v_ab = absorption_potential(kind, mask);
    return pm;
}

PotentialMap sphere_potential(double radius_nm, double amplitude_V, double voxel_size_nm,
                              MoleculeKind kind, double edge_nm) {
    const double reach = radius_nm + 4.0 * edge_nm;
    const int n = 2 * static_cast<int>(std::ceil(reach / voxel_size_nm)) + 1;
    Grid3 shape(n, n, n, voxel_size_nm);
    const Vec3 c = shape.box_center();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 p = shape.voxel_center(i, j, k);
                shape.at(i, j, k) = smooth_sphere(norm(p - c), radius_nm, edge_nm);
            }
    PotentialMap pm;
    pm.v_el = shape;
    for (auto& v : pm.v_el.data()) v *= amplitude_V;
    pm.v_ab = absorption_potential(kind, shape);
    return pm;
}

PotentialMap vesicle_potential(double radius_nm, double wall_nm, double amplitude_V,
                               double voxel_size_nm) {
    const double edge = 0.5;  // nm, smooth profile
    const double reach = radius_nm + wall_nm / 2 + 4.0 * edge;
    const int n = 2 * static_cast<int>(std::ceil(reach / voxel_size_nm)) + 1;
    Grid3 shape(n, n, n, voxel_size_nm);
    const Vec3 c = shape.box_center();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 p = shape.voxel_center(i, j, k);
                const double r = norm(p - c);
                const double inner = smooth_sphere(r, radius_nm - wall_nm / 2, edge);
                const double outer = smooth_sphere(r, radius_nm + wall_nm / 2, edge);
                shape.at(i, j, k) = std::max(0.0, outer - inner);
            }
    PotentialMap pm;
    pm.v_el = shape;
    for (auto& v : pm.v_el.data()) v *= amplitude_V;
    pm.v_ab = absorption_potential(MoleculeKind::Membrane, shape);
    return pm;
}

}  // namespace tomo
