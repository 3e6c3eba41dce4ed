#include "tomo/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tomo/mrc.hpp"
#include "tomo/shape.hpp"

namespace tomo {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<AtomRecord> synthetic_blob_atoms(int n_atoms, double radius_A, uint64_t seed) {
    Rng rng = Rng(seed).substream("blob");
    const char* elems[4] = {"C", "C", "N", "O"};  // rough protein composition
    std::vector<AtomRecord> atoms;
    atoms.reserve(n_atoms);
    for (int i = 0; i < n_atoms; ++i) {
        // uniform in a ball
        double x, y, z;
        do {
            x = rng.uniform(-1, 1);
            y = rng.uniform(-1, 1);
            z = rng.uniform(-1, 1);
        } while (x * x + y * y + z * z > 1.0);
        AtomRecord a;
        a.element = elems[rng.uniform_int(0, 3)];
        a.x = x * radius_A;
        a.y = y * radius_A;
        a.z = z * radius_A;
        atoms.push_back(a);
    }
    return atoms;
}

Catalog build_catalog(const std::vector<CatalogItemConfig>& items, double voxel_nm) {
    Catalog catalog;
    PotentialOptions popt;
    popt.voxel_size_nm = voxel_nm;
    for (const auto& item : items) {
        CatalogEntry e;
        e.class_id = item.class_id;
        if (item.kind == "pdb" || item.kind == "xyz") {
            const auto parsed = parse_structure(read_text_file(item.path));
            e.potential =
                molecule_potential(parsed.atoms, ScatteringTable::bundled(),
                                   MoleculeKind::Protein, popt);
        } else if (item.kind == "blob") {
            const auto atoms =
                synthetic_blob_atoms(item.blob_atoms, item.blob_radius_A, item.blob_seed);
            e.potential = molecule_potential(atoms, ScatteringTable::bundled(),
                                             MoleculeKind::Protein, popt);
        } else {
            throw std::runtime_error("build_catalog: unknown catalog kind '" + item.kind + "'");
        }
        catalog.push_back(std::move(e));
    }
    return catalog;
}

namespace {

json optics_json(const OpticsConfig& o) {
    return json{{"voltage_kV", o.voltage_kV},
                {"spherical_aberration_mm", o.spherical_aberration_mm},
                {"chromatic_aberration_mm", o.chromatic_aberration_mm},
                {"energy_spread_eV", o.energy_spread_eV},
                {"illumination_aperture_urad", o.illumination_aperture_urad},
                {"objective_diameter_um", o.objective_diameter_um},
                {"focal_distance_mm", o.focal_distance_mm},
                {"defocus_um", o.defocus_um},
                {"astigmatism", o.astigmatism},
                {"slice_thickness_nm", o.slice_thickness_nm},
                {"pixel_size_nm", o.pixel_size_nm}};
}

json simulate_config_json(const SimulateConfig& c) {
    json cat = json::array();
    for (const auto& item : c.catalog)
        cat.push_back(json{{"class_id", item.class_id},
                           {"kind", item.kind},
                           {"path", item.path},
                           {"blob_atoms", item.blob_atoms},
                           {"blob_radius_A", item.blob_radius_A},
                           {"blob_seed", item.blob_seed}});
    return json{
        {"seed", c.seed},
        {"ring_scale", c.ring_scale},
        {"ring_power", c.ring_power},
        {"catalog", cat},
        {"placement",
         {{"box_nm", c.placement.box_nm},
          {"voxel_nm", c.placement.voxel_nm},
          {"recon_voxel_nm", c.placement.recon_voxel_nm},
          {"protein_min", c.placement.protein_min},
          {"protein_max", c.placement.protein_max},
          {"fiducial_min", c.placement.fiducial_min},
          {"fiducial_max", c.placement.fiducial_max},
          {"vesicle_min", c.placement.vesicle_min},
          {"vesicle_max", c.placement.vesicle_max},
          {"fiducial_radius_nm", c.placement.fiducial_radius_nm},
          {"vesicle_radius_min_nm", c.placement.vesicle_radius_min_nm},
          {"vesicle_radius_max_nm", c.placement.vesicle_radius_max_nm},
          {"max_attempts", c.placement.max_attempts}}},
        {"optics", optics_json(c.optics)},
        {"tilt",
         {{"n_tilts", c.tilt.n_tilts},
          {"tilt_min_deg", c.tilt.tilt_min_deg},
          {"tilt_max_deg", c.tilt.tilt_max_deg},
          {"defocus_min_um", c.tilt.defocus_min_um},
          {"defocus_max_um", c.tilt.defocus_max_um},
          {"total_dose_min", c.tilt.total_dose_min},
          {"total_dose_max", c.tilt.total_dose_max},
          {"shift_range_nm", c.tilt.shift_range_nm},
          {"apply_ctf", c.tilt.apply_ctf},
          {"apply_dqe", c.tilt.apply_dqe},
          {"poisson", c.tilt.poisson}}},
        {"recon",
         {{"bin_factor", c.recon.bin_factor},
          {"align_shifts", c.recon.align_shifts},
          {"weighting", c.recon.weighting == ReconConfig::Weighting::Ramp    ? "ramp"
                        : c.recon.weighting == ReconConfig::Weighting::Exact ? "exact"
                                                                             : "none"}}}};
}

}  // namespace

SimulateOutputs run_simulate(const SimulateConfig& cfg, const std::string& outdir) {
    fs::create_directories(outdir);
    SimulateOutputs out;
    auto path = [&](const char* name) { return (fs::path(outdir) / name).string(); };

    const Catalog catalog = build_catalog(cfg.catalog, cfg.placement.voxel_nm);
    GrandModel model = place_particles(catalog, cfg.placement, cfg.seed);
    out.placed_particles = static_cast<int>(model.instances.size());

    out.grandmodel_mrc = path("grandmodel.mrc");
    write_mrc(model.potential.v_el, out.grandmodel_mrc);
    out.absorption_mrc = path("grandmodel_absorption.mrc");
    write_mrc(model.potential.v_ab, out.absorption_mrc);

    const int mask_bin =
        static_cast<int>(std::llround(cfg.placement.recon_voxel_nm / cfg.placement.voxel_nm));
    const IntGrid3 occupancy_recon = bin_labels(model.occupancy_mask, mask_bin);
    const IntGrid3 class_recon = bin_labels(model.class_mask, mask_bin);
    out.occupancy_mask_mrc = path("occupancy_mask.mrc");
    write_mrc_labels(occupancy_recon, out.occupancy_mask_mrc);
    out.class_mask_mrc = path("class_mask.mrc");
    write_mrc_labels(class_recon, out.class_mask_mrc);

    out.ground_truth_txt = path("ground_truth.txt");
    write_text_file(out.ground_truth_txt, export_ground_truth(model));

    TiltSeries ts = simulate_tiltseries(model, cfg.optics, cfg.tilt, cfg.seed);
    if (cfg.ring_scale) {
        const double defocus_nm = ts.defocus_um * 1.0e3;
        for (size_t t = 0; t < ts.projections.size(); ++t) {
            const Grid3 ref = synthetic_reference(ts.projections[t], cfg.optics, defocus_nm,
                                                  cfg.ring_power,
                                                  splitmix64(cfg.seed ^ (0x5eed + t)));
            ts.projections[t] = ring_scale(ts.projections[t], ref);
        }
    }

    out.tilt_stack_mrc = path("tiltseries.mrc");
    write_mrc_stack(ts.projections, out.tilt_stack_mrc);

    json meta;
    meta["angles_deg"] = ts.angles_deg;
    meta["shifts_nm"] = ts.shifts_nm;
    meta["per_tilt_dose"] = ts.per_tilt_dose;
    meta["defocus_um"] = ts.defocus_um;
    meta["total_dose"] = ts.total_dose;
    meta["seed"] = ts.seed;
    meta["optics"] = optics_json(ts.optics);
    out.tilt_meta_json = path("tiltseries_meta.json");
    write_text_file(out.tilt_meta_json, meta.dump(2) + "\n");

    TiltSeries prepared = ts;
    for (auto& p : prepared.projections) p = normalize_projection(p);
    const Grid3 tomogram = weighted_backprojection(prepared, cfg.recon);
    out.tomogram_mrc = path("tomogram.mrc");
    write_mrc(tomogram, out.tomogram_mrc);

    out.snr = estimate_snr(tomogram, occupancy_recon);
    json snr_j{{"var_noise", out.snr.var_noise},
               {"var_noisy_signal", out.snr.var_noisy_signal},
               {"var_signal", out.snr.var_signal},
               {"snr", out.snr.snr},
               {"clamped", out.snr.clamped}};
    out.snr_json = path("snr.json");
    write_text_file(out.snr_json, snr_j.dump(2) + "\n");

    out.config_json = path("run_config.json");
    write_text_file(out.config_json, simulate_config_json(cfg).dump(2) + "\n");
    return out;
}

std::string run_reconstruct(const std::string& stack_mrc, const std::string& meta_json,
                            const ReconConfig& cfg, const std::string& outdir) {
    fs::create_directories(outdir);
    TiltSeries ts;
    ts.projections = read_mrc_stack(stack_mrc);
    const json meta = json::parse(read_text_file(meta_json));
    ts.angles_deg = meta.at("angles_deg").get<std::vector<double>>();
    if (meta.contains("shifts_nm"))
        ts.shifts_nm = meta.at("shifts_nm").get<std::vector<std::array<double, 2>>>();
    for (auto& p : ts.projections) p = normalize_projection(p);
    const Grid3 tomogram = weighted_backprojection(ts, cfg);
    const std::string out = (fs::path(outdir) / "tomogram.mrc").string();
    write_mrc(tomogram, out);
    return out;
}

MatchOutputs run_match(const MatchConfig& cfg, const std::string& outdir) {
    fs::create_directories(outdir);
    const Grid3 tomogram = read_mrc(cfg.tomogram_path);

    const Catalog catalog = build_catalog(cfg.catalog, cfg.template_options.target_voxel_nm);
    const auto orientations = so3_grid(cfg.angular_step_deg);

    MatchOutputs out;
    json timing = json::array();

    // overlap-filter priority: round, symmetric particles first
    std::vector<std::pair<std::string, double>> order_by_psi;
    std::map<std::string, double> radius_vox;

    for (const auto& entry : catalog) {
        const auto t0 = std::chrono::steady_clock::now();
        auto [normal, flipped] = build_template(entry.class_id, entry.potential,
                                                cfg.template_options);
        const double excl = cfg.exclusion_radius_vox > 0
                                ? cfg.exclusion_radius_vox
                                : normal.mask_radius_nm / tomogram.voxel_size();

        std::vector<Candidate> merged;
        for (const TemplateSpec* ts : {&normal, &flipped}) {
            const NccResult res = ncc_search(tomogram, ts->volume, ts->mask, orientations);
            const auto cands =
                extract_candidates(res, entry.class_id, cfg.top_n, excl, ts->handedness);
            merged = merged.empty() ? cands : merge_candidates(merged, cands);
        }
        if (merged.size() >= 20) {
            const std::vector<double> scores = [&] {
                std::vector<double> s;
                for (const auto& c : merged) s.push_back(c.score);
                return s;
            }();
            const ScoreThreshold thr = fit_threshold(scores);
            merged = apply_threshold(merged, thr.cutoff);
        }
        for (const auto& c : merged) out.accepted.push_back(c);

        ShapeDescriptors sd;
        try {
            sd = shape_descriptors(entry.potential.v_el);
        } catch (const std::exception&) {
            sd.sphericity = 0;
            sd.eff_radius = normal.mask_radius_nm;
        }
        order_by_psi.emplace_back(entry.class_id, sd.sphericity);
        radius_vox[entry.class_id] = sd.eff_radius / tomogram.voxel_size();

        const auto t1 = std::chrono::steady_clock::now();
        timing.push_back(
            {{"class", entry.class_id},
             {"seconds", std::chrono::duration<double>(t1 - t0).count()},
             {"candidates", merged.size()}});
    }

    if (cfg.overlap_filter) {
        std::stable_sort(order_by_psi.begin(), order_by_psi.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        std::vector<std::string> order;
        for (const auto& [cls, psi] : order_by_psi) order.push_back(cls);
        out.accepted = overlap_filter(out.accepted, radius_vox, order);
    }

    if (cfg.detect_fiducials) {
        LogDetectOptions lopt;
        lopt.sigma_vox = cfg.log_sigma_vox;
        const auto beads = log_fiducial_detect(tomogram, lopt);
        for (const auto& p : beads) {
            Candidate c;
            c.class_id = "fiducial";
            c.position = p;
            c.score = 1.0;
            out.accepted.push_back(c);
        }
    }

    out.predictions_txt = (fs::path(outdir) / "predictions.txt").string();
    write_text_file(out.predictions_txt, format_predictions(out.accepted));
    out.timing_json = (fs::path(outdir) / "match_timing.json").string();
    write_text_file(out.timing_json, timing.dump(2) + "\n");
    return out;
}

EvaluateOutputs run_evaluate(const EvaluateConfig& cfg, const std::string& outdir) {
    fs::create_directories(outdir);

    BenchGroundTruth gt;
    gt.entries = parse_ground_truth(read_text_file(cfg.ground_truth_path));
    if (!cfg.occupancy_path.empty()) gt.occupancy = read_mrc_labels(cfg.occupancy_path);

    const PredictionSet preds =
        parse_predictions(read_text_file(cfg.predictions_path), cfg.predictions_path);

    MatchOptions mopt;
    mopt.exclusions = cfg.exclusions;
    mopt.fallback_radius_vox = cfg.fallback_radius_vox;

    EvaluateOutputs out;
    out.report = match_predictions(preds, gt, mopt);
    out.global = compute_metrics(out.report);

    const auto per_class = per_class_results(preds, gt, mopt);
    std::map<std::string, double> f1_by_class;
    for (const auto& [cls, r] : per_class)
        if (r.metrics) f1_by_class[cls] = r.metrics->f1;
    const GroupF1 groups = group_f1(f1_by_class, ClassWeights::bundled());
    const ConfusionMatrix cm = confusion_matrix(preds, gt, mopt);
    std::vector<std::string> class_list;
    for (const auto& [cls, f1] : f1_by_class) class_list.push_back(cls);
    const auto order = ClassWeights::bundled().order_by_weight(class_list);
    const auto cumulative = cumulative_f1(f1_by_class, order);

    std::ostringstream txt;
    txt.precision(3);
    txt << std::fixed;
    txt << "Localization\n";
    txt << "  RR " << out.report.rr << "  TP " << out.report.tp << "  FP " << out.report.fp
        << "  FN " << out.report.fn << "  MH " << out.report.mh << "  AD " << out.report.ad
        << "\n";
    txt << "  Recall " << out.global.recall << "  Precision " << out.global.precision
        << "  Miss rate " << out.global.miss_rate << "  F1 " << out.global.f1 << "\n\n";
    txt << "Per-class F1\n";
    for (const auto& cls : order) {
        txt << "  " << cls << " ";
        const auto& r = per_class.at(cls);
        if (r.metrics)
            txt << r.metrics->f1;
        else
            txt << "n/a";
        txt << "  (RR " << r.rr << " TP " << r.tp << " FN " << r.fn << ")\n";
    }
    txt << "\nSize groups (mean F1)\n";
    txt << "  small " << groups.small << "  medium " << groups.medium << "  large "
        << groups.large << "\n";
    txt << "\nConfusion matrix (rows: true class + background, cols: predicted)\n";
    for (size_t r = 0; r <= cm.classes.size(); ++r) {
        txt << "  " << (r < cm.classes.size() ? cm.classes[r] : std::string("background"));
        for (size_t c = 0; c < cm.classes.size(); ++c) txt << ' ' << cm.counts[r][c];
        txt << '\n';
    }

    json j;
    j["localization"] = {{"RR", out.report.rr},         {"TP", out.report.tp},
                         {"FP", out.report.fp},         {"FN", out.report.fn},
                         {"MH", out.report.mh},         {"AD", out.report.ad},
                         {"Recall", out.global.recall}, {"Precision", out.global.precision},
                         {"MissRate", out.global.miss_rate}, {"F1", out.global.f1}};
    json jpc = json::object();
    for (const auto& [cls, r] : per_class) {
        json row{{"RR", r.rr}, {"TP", r.tp}, {"FN", r.fn}, {"gt_count", r.gt_count}};
        if (r.metrics)
            row["F1"] = r.metrics->f1;
        else
            row["F1"] = nullptr;
        jpc[cls] = row;
    }
    j["per_class"] = jpc;
    j["groups"] = {{"small", groups.small}, {"medium", groups.medium}, {"large", groups.large}};
    json jcum = json::array();
    for (const auto& [cls, v] : cumulative) jcum.push_back({{"class", cls}, {"cumulative", v}});
    j["cumulative_f1"] = jcum;
    json jcm;
    jcm["classes"] = cm.classes;
    jcm["counts"] = cm.counts;
    j["confusion"] = jcm;
    for (const auto& w : out.report.warnings) j["warnings"].push_back(w);

    namespace fs = std::filesystem;
    out.report_txt = (fs::path(outdir) / "evaluation.txt").string();
    write_text_file(out.report_txt, txt.str());
    out.report_json = (fs::path(outdir) / "evaluation.json").string();
    write_text_file(out.report_json, j.dump(2) + "\n");
    return out;
}

}  // namespace tomo
