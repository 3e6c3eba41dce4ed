// Command-line front end: simulate / reconstruct / match / evaluate / describe.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tomo/datadir.hpp"
#include "tomo/parallel.hpp"
#include "tomo/pipeline.hpp"
#include "tomo/shape.hpp"

using nlohmann::json;
using namespace tomo;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::runtime_error("config: unknown key '" + key + "' in " + where);
    }
}

std::vector<CatalogItemConfig> parse_catalog(const json& j) {
    std::vector<CatalogItemConfig> items;
    for (const auto& e : j) {
        check_keys(e, {"class_id", "kind", "path", "blob_atoms", "blob_radius_A", "blob_seed"},
                   "catalog entry");
        CatalogItemConfig c;
        c.class_id = e.at("class_id").get<std::string>();
        if (e.contains("kind")) c.kind = e["kind"].get<std::string>();
        if (e.contains("path")) c.path = e["path"].get<std::string>();
        if (e.contains("blob_atoms")) c.blob_atoms = e["blob_atoms"].get<int>();
        if (e.contains("blob_radius_A")) c.blob_radius_A = e["blob_radius_A"].get<double>();
        if (e.contains("blob_seed")) c.blob_seed = e["blob_seed"].get<uint64_t>();
        items.push_back(c);
    }
    return items;
}

void parse_optics(const json& j, OpticsConfig& o) {
    check_keys(j,
               {"voltage_kV", "spherical_aberration_mm", "chromatic_aberration_mm",
                "energy_spread_eV", "illumination_aperture_urad", "objective_diameter_um",
                "focal_distance_mm", "defocus_um", "astigmatism", "slice_thickness_nm",
                "pixel_size_nm"},
               "optics");
    if (j.contains("voltage_kV")) o.voltage_kV = j["voltage_kV"];
    if (j.contains("spherical_aberration_mm")) o.spherical_aberration_mm = j["spherical_aberration_mm"];
    if (j.contains("chromatic_aberration_mm")) o.chromatic_aberration_mm = j["chromatic_aberration_mm"];
    if (j.contains("energy_spread_eV")) o.energy_spread_eV = j["energy_spread_eV"];
    if (j.contains("illumination_aperture_urad")) o.illumination_aperture_urad = j["illumination_aperture_urad"];
    if (j.contains("objective_diameter_um")) o.objective_diameter_um = j["objective_diameter_um"];
    if (j.contains("focal_distance_mm")) o.focal_distance_mm = j["focal_distance_mm"];
    if (j.contains("defocus_um")) o.defocus_um = j["defocus_um"];
    if (j.contains("astigmatism")) o.astigmatism = j["astigmatism"];
    if (j.contains("slice_thickness_nm")) o.slice_thickness_nm = j["slice_thickness_nm"];
    if (j.contains("pixel_size_nm")) o.pixel_size_nm = j["pixel_size_nm"];
}

SimulateConfig parse_simulate_config(const json& j) {
    check_keys(j, {"seed", "ring_scale", "ring_power", "catalog", "placement", "optics", "tilt",
                   "recon"},
               "simulate config");
    SimulateConfig c;
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("ring_scale")) c.ring_scale = j["ring_scale"];
    if (j.contains("ring_power")) c.ring_power = j["ring_power"];
    if (j.contains("catalog")) c.catalog = parse_catalog(j["catalog"]);
    if (j.contains("placement")) {
        const json& p = j["placement"];
        check_keys(p,
                   {"box_nm", "voxel_nm", "recon_voxel_nm", "protein_min", "protein_max",
                    "fiducial_min", "fiducial_max", "vesicle_min", "vesicle_max",
                    "fiducial_radius_nm", "vesicle_radius_min_nm", "vesicle_radius_max_nm",
                    "vesicle_wall_nm", "gold_potential_V", "membrane_potential_V",
                    "max_attempts"},
                   "placement");
        auto& pc = c.placement;
        if (p.contains("box_nm")) pc.box_nm = p["box_nm"];
        if (p.contains("voxel_nm")) pc.voxel_nm = p["voxel_nm"];
        if (p.contains("recon_voxel_nm")) pc.recon_voxel_nm = p["recon_voxel_nm"];
        if (p.contains("protein_min")) pc.protein_min = p["protein_min"];
        if (p.contains("protein_max")) pc.protein_max = p["protein_max"];
        if (p.contains("fiducial_min")) pc.fiducial_min = p["fiducial_min"];
        if (p.contains("fiducial_max")) pc.fiducial_max = p["fiducial_max"];
        if (p.contains("vesicle_min")) pc.vesicle_min = p["vesicle_min"];
        if (p.contains("vesicle_max")) pc.vesicle_max = p["vesicle_max"];
        if (p.contains("fiducial_radius_nm")) pc.fiducial_radius_nm = p["fiducial_radius_nm"];
        if (p.contains("vesicle_radius_min_nm")) pc.vesicle_radius_min_nm = p["vesicle_radius_min_nm"];
        if (p.contains("vesicle_radius_max_nm")) pc.vesicle_radius_max_nm = p["vesicle_radius_max_nm"];
        if (p.contains("vesicle_wall_nm")) pc.vesicle_wall_nm = p["vesicle_wall_nm"];
        if (p.contains("gold_potential_V")) pc.gold_potential_V = p["gold_potential_V"];
        if (p.contains("membrane_potential_V")) pc.membrane_potential_V = p["membrane_potential_V"];
        if (p.contains("max_attempts")) pc.max_attempts = p["max_attempts"];
    }
    if (j.contains("optics")) parse_optics(j["optics"], c.optics);
    if (j.contains("tilt")) {
        const json& t = j["tilt"];
        check_keys(t,
                   {"n_tilts", "tilt_min_deg", "tilt_max_deg", "defocus_min_um", "defocus_max_um",
                    "total_dose_min", "total_dose_max", "shift_range_nm", "apply_ctf",
                    "apply_dqe", "poisson"},
                   "tilt");
        auto& tc = c.tilt;
        if (t.contains("n_tilts")) tc.n_tilts = t["n_tilts"];
        if (t.contains("tilt_min_deg")) tc.tilt_min_deg = t["tilt_min_deg"];
        if (t.contains("tilt_max_deg")) tc.tilt_max_deg = t["tilt_max_deg"];
        if (t.contains("defocus_min_um")) tc.defocus_min_um = t["defocus_min_um"];
        if (t.contains("defocus_max_um")) tc.defocus_max_um = t["defocus_max_um"];
        if (t.contains("total_dose_min")) tc.total_dose_min = t["total_dose_min"];
        if (t.contains("total_dose_max")) tc.total_dose_max = t["total_dose_max"];
        if (t.contains("shift_range_nm")) tc.shift_range_nm = t["shift_range_nm"];
        if (t.contains("apply_ctf")) tc.apply_ctf = t["apply_ctf"];
        if (t.contains("apply_dqe")) tc.apply_dqe = t["apply_dqe"];
        if (t.contains("poisson")) tc.poisson = t["poisson"];
    }
    if (j.contains("recon")) {
        const json& r = j["recon"];
        check_keys(r, {"weighting", "bin_factor", "output_dims", "align_shifts"}, "recon");
        if (r.contains("bin_factor")) c.recon.bin_factor = r["bin_factor"];
        if (r.contains("align_shifts")) c.recon.align_shifts = r["align_shifts"];
        if (r.contains("output_dims"))
            c.recon.output_dims = r["output_dims"].get<std::array<int, 3>>();
        if (r.contains("weighting")) {
            const std::string w = r["weighting"];
            if (w == "ramp")
                c.recon.weighting = ReconConfig::Weighting::Ramp;
            else if (w == "exact")
                c.recon.weighting = ReconConfig::Weighting::Exact;
            else if (w == "none")
                c.recon.weighting = ReconConfig::Weighting::None;
            else
                throw std::runtime_error("config: unknown weighting '" + w + "'");
        }
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cryo-electron tomography simulation and benchmarking toolkit"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "Worker threads (1 = reference behavior)")
        ->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Phantom -> tilt series -> tomogram");
    std::string sim_config, sim_out = "out";
    uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    sim->add_option("--config", sim_config, "JSON config file");
    sim->add_option("--out", sim_out, "Output directory")->capture_default_str();
    auto* seed_opt = sim->add_option("--seed", sim_seed, "Override the config seed");
    sim->callback([&] { sim_seed_set = seed_opt->count() > 0; });

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "Weighted back-projection of a stack");
    std::string rec_stack, rec_meta, rec_out = "out";
    int rec_bin = 2;
    bool rec_no_align = false;
    std::string rec_weighting = "ramp";
    rec->add_option("--stack", rec_stack, "Tilt stack MRC")->required();
    rec->add_option("--meta", rec_meta, "Sidecar metadata JSON")->required();
    rec->add_option("--out", rec_out, "Output directory")->capture_default_str();
    rec->add_option("--bin", rec_bin, "Binning factor")->capture_default_str();
    rec->add_option("--weighting", rec_weighting, "ramp|exact|none")->capture_default_str();
    rec->add_flag("--no-align", rec_no_align, "Keep the recorded shifts unsubtracted");

    // match
    auto* mat = app.add_subcommand("match", "Template matching over a tomogram");
    std::string mat_tomogram, mat_config, mat_out = "out", mat_variant = "tm";
    double mat_step = 30.0;
    int mat_topn = 100;
    bool mat_no_fiducials = false;
    mat->add_option("--tomogram", mat_tomogram, "Tomogram MRC")->required();
    mat->add_option("--config", mat_config, "JSON config with the template catalog")->required();
    mat->add_option("--variant", mat_variant, "tm | tm-f")->capture_default_str();
    mat->add_option("--out", mat_out, "Output directory")->capture_default_str();
    mat->add_option("--angular-step", mat_step, "Orientation grid spacing, degrees")
        ->capture_default_str();
    mat->add_option("--top-n", mat_topn, "Candidates per class and handedness")
        ->capture_default_str();
    mat->add_flag("--no-fiducials", mat_no_fiducials, "Skip the LoG fiducial pass");

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "Score predictions against ground truth");
    std::string eva_pred, eva_gt, eva_occ, eva_out = "out";
    std::vector<std::string> eva_exclude;
    double eva_radius = 0;
    eva->add_option("--predictions", eva_pred, "Predictions text file")->required();
    eva->add_option("--ground-truth", eva_gt, "Ground-truth text file")->required();
    eva->add_option("--occupancy", eva_occ, "Occupancy mask MRC (canonical matcher)");
    eva->add_option("--out", eva_out, "Output directory")->capture_default_str();
    eva->add_option("--exclude-class", eva_exclude, "Classes removed from the evaluation");
    eva->add_option("--match-radius", eva_radius,
                    "Radius matcher in voxels (fallback when no mask is given)");

    // describe
    auto* des = app.add_subcommand("describe", "Shape descriptors of a structure file");
    std::string des_structure;
    double des_voxel = 0.5;
    des->add_option("structure", des_structure, "PDB or XYZ file")->required();
    des->add_option("--voxel-nm", des_voxel, "Sampling for the density grid")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    set_thread_count(threads);

    try {
        if (*sim) {
            SimulateConfig cfg;
            if (!sim_config.empty())
                cfg = parse_simulate_config(json::parse(read_text_file(sim_config)));
            if (sim_seed_set) cfg.seed = sim_seed;
            const auto out = run_simulate(cfg, sim_out);
            std::cout << "placed " << out.placed_particles << " particles\n"
                      << "tomogram: " << out.tomogram_mrc << "\n"
                      << "snr: " << out.snr.snr << (out.snr.clamped ? " (clamped)" : "") << "\n";
        } else if (*rec) {
            ReconConfig cfg;
            cfg.bin_factor = rec_bin;
            cfg.align_shifts = !rec_no_align;
            if (rec_weighting == "exact")
                cfg.weighting = ReconConfig::Weighting::Exact;
            else if (rec_weighting == "none")
                cfg.weighting = ReconConfig::Weighting::None;
            else if (rec_weighting != "ramp")
                throw std::runtime_error("unknown weighting '" + rec_weighting + "'");
            std::cout << "tomogram: " << run_reconstruct(rec_stack, rec_meta, cfg, rec_out)
                      << "\n";
        } else if (*mat) {
            const json j = json::parse(read_text_file(mat_config));
            check_keys(j, {"catalog", "template"}, "match config");
            MatchConfig cfg;
            cfg.tomogram_path = mat_tomogram;
            cfg.catalog = parse_catalog(j.at("catalog"));
            if (j.contains("template")) {
                const json& t = j["template"];
                check_keys(t, {"defocus_um", "lowpass_nm", "target_voxel_nm"}, "template");
                if (t.contains("defocus_um")) cfg.template_options.defocus_um = t["defocus_um"];
                if (t.contains("lowpass_nm")) cfg.template_options.lowpass_nm = t["lowpass_nm"];
                if (t.contains("target_voxel_nm"))
                    cfg.template_options.target_voxel_nm = t["target_voxel_nm"];
            }
            if (mat_variant == "tm-f")
                cfg.overlap_filter = true;
            else if (mat_variant != "tm")
                throw std::runtime_error("unknown variant '" + mat_variant + "' (tm | tm-f)");
            cfg.angular_step_deg = mat_step;
            cfg.top_n = mat_topn;
            cfg.detect_fiducials = !mat_no_fiducials;
            const auto out = run_match(cfg, mat_out);
            std::cout << "predictions: " << out.predictions_txt << " (" << out.accepted.size()
                      << " entries)\n";
        } else if (*eva) {
            EvaluateConfig cfg;
            cfg.predictions_path = eva_pred;
            cfg.ground_truth_path = eva_gt;
            cfg.occupancy_path = eva_occ;
            cfg.exclusions = eva_exclude;
            cfg.fallback_radius_vox = eva_radius;
            const auto out = run_evaluate(cfg, eva_out);
            std::cout << read_text_file(out.report_txt);
        } else if (*des) {
            const auto parsed = parse_structure(read_text_file(des_structure));
            for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
            PotentialOptions popt;
            popt.voxel_size_nm = des_voxel;
            const Grid3 v = electrostatic_potential(parsed.atoms, ScatteringTable::bundled(), popt);
            const ShapeDescriptors d = shape_descriptors(v);
            std::cout << "atoms " << parsed.atoms.size() << "\n"
                      << "volume_nm3 " << d.volume << "\n"
                      << "area_nm2 " << d.area << "\n"
                      << "sphericity " << d.sphericity << "\n"
                      << "eff_radius_nm " << d.eff_radius << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
