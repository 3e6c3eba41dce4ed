#include "tomo/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tomo/bspline.hpp"

namespace tomo {

namespace {

struct Pending {
    std::string class_id;
    const PotentialMap* shared = nullptr;  // catalog-owned
    PotentialMap owned;                    // per-instance (vesicles)
    double nominal_radius = 0;             // placement ordering

    const PotentialMap& potential() const { return shared ? *shared : owned; }
};

double half_extent(const PotentialMap& pm) {
    return 0.5 * pm.v_el.voxel_size() *
           std::max({pm.v_el.nx(), pm.v_el.ny(), pm.v_el.nz()});
}

}  // namespace

int GrandModel::class_index(const std::string& id) const {
    for (size_t i = 0; i < class_names.size(); ++i)
        if (class_names[i] == id) return static_cast<int>(i) + 1;
    return 0;
}

EulerZXZ sample_so3(Rng& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double u3 = rng.uniform();
    const double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
    const double w = s1 * std::sin(2.0 * kPi * u2);
    const double x = s1 * std::cos(2.0 * kPi * u2);
    const double y = s2 * std::sin(2.0 * kPi * u3);
    const double z = s2 * std::cos(2.0 * kPi * u3);
    return euler_from_matrix(quat_to_matrix(w, x, y, z));
}

GrandModel place_particles(const Catalog& catalog, const PlacementConfig& cfg, uint64_t seed) {
    if (catalog.empty()) throw std::invalid_argument("place_particles: empty catalog");
    const int n = static_cast<int>(std::llround(cfg.box_nm / cfg.voxel_nm));
    if (n <= 0) throw std::invalid_argument("place_particles: box too small");

    Rng rng = Rng(seed).substream("placement");

    GrandModel model;
    model.rng_seed = seed;
    model.recon_voxel_nm = cfg.recon_voxel_nm;
    model.ice_potential_V = cfg.ice_potential_V;
    model.ice_absorption = cfg.ice_absorption;
    model.potential.v_el = Grid3(n, n, n, cfg.voxel_nm);
    model.potential.v_ab = Grid3(n, n, n, cfg.voxel_nm);
    model.class_mask = IntGrid3(n, n, n, cfg.voxel_nm);
    model.occupancy_mask = IntGrid3(n, n, n, cfg.voxel_nm);

    for (const auto& e : catalog) model.class_names.push_back(e.class_id);
    const bool catalog_has_fiducial =
        std::any_of(catalog.begin(), catalog.end(),
                    [](const CatalogEntry& e) { return e.class_id == "fiducial"; });
    const bool catalog_has_vesicle =
        std::any_of(catalog.begin(), catalog.end(),
                    [](const CatalogEntry& e) { return e.class_id == "vesicle"; });

    const int n_protein = static_cast<int>(rng.uniform_int(cfg.protein_min, cfg.protein_max));
    const int n_fiducial = static_cast<int>(rng.uniform_int(cfg.fiducial_min, cfg.fiducial_max));
    const int n_vesicle = static_cast<int>(rng.uniform_int(cfg.vesicle_min, cfg.vesicle_max));

    std::vector<const CatalogEntry*> proteins;
    for (const auto& e : catalog)
        if (e.class_id != "fiducial" && e.class_id != "vesicle") proteins.push_back(&e);

    // Built-in classes keep stable indices regardless of the drawn counts.
    if (!catalog_has_fiducial) model.class_names.push_back("fiducial");
    if (!catalog_has_vesicle) model.class_names.push_back("vesicle");

    PotentialMap fiducial_pm;
    if (n_fiducial > 0 && !catalog_has_fiducial)
        fiducial_pm = sphere_potential(cfg.fiducial_radius_nm, cfg.gold_potential_V,
                                       cfg.voxel_nm, MoleculeKind::Gold);

    std::vector<Pending> pending;
    for (int i = 0; i < n_vesicle; ++i) {
        Pending p;
        p.class_id = "vesicle";
        const double r = rng.uniform(cfg.vesicle_radius_min_nm, cfg.vesicle_radius_max_nm);
        p.owned = vesicle_potential(r, cfg.vesicle_wall_nm, cfg.membrane_potential_V, cfg.voxel_nm);
        p.nominal_radius = half_extent(p.owned);
        pending.push_back(std::move(p));
    }
    for (int i = 0; i < n_fiducial; ++i) {
        Pending p;
        p.class_id = "fiducial";
        p.shared = &fiducial_pm;
        if (catalog_has_fiducial)
            for (const auto& e : catalog)
                if (e.class_id == "fiducial") p.shared = &e.potential;
        p.nominal_radius = half_extent(*p.shared);
        pending.push_back(std::move(p));
    }
    if (n_protein > 0 && proteins.empty())
        throw std::invalid_argument("place_particles: protein count requested but no protein classes");
    for (int i = 0; i < n_protein; ++i) {
        const auto* e = proteins[rng.uniform_int(0, static_cast<int64_t>(proteins.size()) - 1)];
        Pending p;
        p.class_id = e->class_id;
        p.shared = &e->potential;
        p.nominal_radius = half_extent(*p.shared);
        pending.push_back(std::move(p));
    }

    // Larger particles first raises packing success; stable to keep the draw order otherwise.
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending& a, const Pending& b) {
                         return a.nominal_radius > b.nominal_radius;
                     });

    int next_id = 1;
    for (const auto& p : pending) {
        const PotentialMap& pm = p.potential();
        const Grid3& el = pm.v_el;
        if (el.nx() > n || el.ny() > n || el.nz() > n)
            throw std::runtime_error("place_particles: particle '" + p.class_id +
                                     "' does not fit in the box");

        const EulerZXZ orient = sample_so3(rng);
        const Grid3 rot_el = rotate_bspline(el, orient, el.box_center(), 0.0);
        const Grid3 rot_ab = rotate_bspline(pm.v_ab, orient, el.box_center(), 0.0);

        const double peak = max_value(rot_el);
        const double level = cfg.footprint_threshold * peak;
        std::vector<size_t> footprint;
        for (size_t v = 0; v < rot_el.size(); ++v)
            if (rot_el[v] > level) footprint.push_back(v);
        if (footprint.empty())
            throw std::runtime_error("place_particles: empty footprint for '" + p.class_id + "'");

        bool placed = false;
        for (int attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
            const int ox = static_cast<int>(rng.uniform_int(0, n - el.nx()));
            const int oy = static_cast<int>(rng.uniform_int(0, n - el.ny()));
            const int oz = static_cast<int>(rng.uniform_int(0, n - el.nz()));

            bool overlap = false;
            for (size_t fv : footprint) {
                const int li = static_cast<int>(fv % el.nx());
                const int lj = static_cast<int>((fv / el.nx()) % el.ny());
                const int lk = static_cast<int>(fv / (static_cast<size_t>(el.nx()) * el.ny()));
                if (model.occupancy_mask.at(li + ox, lj + oy, lk + oz) != 0) {
                    overlap = true;
                    break;
                }
            }
            if (overlap) continue;

            paste(rot_el, model.potential.v_el, {ox, oy, oz}, PasteMode::Add);
            paste(rot_ab, model.potential.v_ab, {ox, oy, oz}, PasteMode::Add);
            const int cls = model.class_index(p.class_id);
            for (size_t fv : footprint) {
                const int li = static_cast<int>(fv % el.nx());
                const int lj = static_cast<int>((fv / el.nx()) % el.ny());
                const int lk = static_cast<int>(fv / (static_cast<size_t>(el.nx()) * el.ny()));
                model.occupancy_mask.at(li + ox, lj + oy, lk + oz) = next_id;
                model.class_mask.at(li + ox, lj + oy, lk + oz) = cls;
            }
            ParticleInstance inst;
            inst.class_id = p.class_id;
            inst.orientation = orient;
            inst.instance_id = next_id;
            inst.center = {(ox + 0.5 * el.nx()) * cfg.voxel_nm,
                           (oy + 0.5 * el.ny()) * cfg.voxel_nm,
                           (oz + 0.5 * el.nz()) * cfg.voxel_nm};
            model.instances.push_back(inst);
            ++next_id;
            placed = true;
        }
        if (!placed)
            throw std::runtime_error("place_particles: failed to place '" + p.class_id +
                                     "' after " + std::to_string(cfg.max_attempts) +
                                     " attempts; placed " + std::to_string(next_id - 1) + " of " +
                                     std::to_string(pending.size()));
    }

    for (auto& v : model.potential.v_el.data()) v += cfg.ice_potential_V;
    for (auto& v : model.potential.v_ab.data()) v += cfg.ice_absorption;
    return model;
}

std::string export_ground_truth(const GrandModel& model) {
    std::ostringstream out;
    out.precision(10);
    const double rv = model.recon_voxel_nm;
    for (const auto& inst : model.instances) {
        // physical nm -> continuous voxel coordinate of the reconstruction frame
        out << inst.class_id << ' ' << inst.center[0] / rv - 0.5 << ' '
            << inst.center[1] / rv - 0.5 << ' ' << inst.center[2] / rv - 0.5 << ' '
            << inst.orientation.phi << ' ' << inst.orientation.theta << ' '
            << inst.orientation.psi << '\n';
    }
    return out.str();
}

std::vector<GroundTruthEntry> parse_ground_truth(const std::string& text) {
    std::vector<GroundTruthEntry> entries;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        GroundTruthEntry e;
        ls >> e.class_id >> e.position[0] >> e.position[1] >> e.position[2] >>
            e.orientation.phi >> e.orientation.theta >> e.orientation.psi;
        if (!ls)
            throw std::runtime_error("parse_ground_truth: malformed line " +
                                     std::to_string(line_no));
        entries.push_back(e);
    }
    return entries;
}

IntGrid3 bin_labels(const IntGrid3& mask, int factor) {
    if (factor < 1) throw std::invalid_argument("bin_labels: factor must be >= 1");
    if (mask.nx() % factor || mask.ny() % factor || mask.nz() % factor)
        throw std::invalid_argument("bin_labels: dims not divisible by factor");
    IntGrid3 out(mask.nx() / factor, mask.ny() / factor, mask.nz() / factor,
                 mask.voxel_size() * factor, mask.origin());
    std::map<int32_t, int> counts;
    for (int k = 0; k < out.nz(); ++k)
        for (int j = 0; j < out.ny(); ++j)
            for (int i = 0; i < out.nx(); ++i) {
                counts.clear();
                for (int dk = 0; dk < factor; ++dk)
                    for (int dj = 0; dj < factor; ++dj)
                        for (int di = 0; di < factor; ++di)
                            ++counts[mask.at(i * factor + di, j * factor + dj, k * factor + dk)];
                int32_t best = 0;
                int best_count = -1;
                for (const auto& [label, cnt] : counts)
                    if (cnt > best_count || (cnt == best_count && label > best)) {
                        best = label;
                        best_count = cnt;
                    }
                out.at(i, j, k) = best;
            }
    return out;
}

}  // namespace tomo
