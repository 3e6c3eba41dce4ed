#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "tomo/mrc.hpp"
#include "tomo/pipeline.hpp"

using namespace tomo;
namespace fs = std::filesystem;

namespace {

SimulateConfig tiny_config() {
    SimulateConfig cfg;
    cfg.seed = 11;
    cfg.placement.box_nm = 32;
    cfg.placement.voxel_nm = 0.5;
    cfg.placement.recon_voxel_nm = 1.0;
    cfg.placement.protein_min = cfg.placement.protein_max = 8;
    cfg.placement.fiducial_min = cfg.placement.fiducial_max = 1;
    cfg.placement.fiducial_radius_nm = 2.5;
    cfg.placement.vesicle_min = cfg.placement.vesicle_max = 0;
    cfg.tilt.n_tilts = 9;
    cfg.ring_scale = true;
    CatalogItemConfig blob;
    blob.class_id = "blob";
    blob.kind = "blob";
    blob.blob_atoms = 150;
    blob.blob_radius_A = 12.0;
    cfg.catalog.push_back(blob);
    return cfg;
}

std::string read_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string tmp_dir(const char* name) {
    const auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d.string();
}

}  // namespace

TEST_CASE("simulate pipeline writes every artifact and is byte deterministic") {
    const SimulateConfig cfg = tiny_config();
    const std::string out1 = tmp_dir("tomosim_sim1");
    const std::string out2 = tmp_dir("tomosim_sim2");
    const SimulateOutputs a = run_simulate(cfg, out1);
    const SimulateOutputs b = run_simulate(cfg, out2);

    CHECK(a.placed_particles == 9);
    for (const std::string* p :
         {&a.grandmodel_mrc, &a.absorption_mrc, &a.class_mask_mrc, &a.occupancy_mask_mrc,
          &a.ground_truth_txt, &a.tilt_stack_mrc, &a.tilt_meta_json, &a.tomogram_mrc,
          &a.snr_json, &a.config_json})
        CHECK(fs::exists(*p));

    // identical seeds: byte-identical outputs
    for (const char* name : {"grandmodel.mrc", "occupancy_mask.mrc", "class_mask.mrc",
                             "ground_truth.txt", "tiltseries.mrc", "tiltseries_meta.json",
                             "tomogram.mrc", "snr.json", "run_config.json"})
        CHECK(read_bytes(out1 + "/" + name) == read_bytes(out2 + "/" + name));

    // different seed: different tomogram
    SimulateConfig other = cfg;
    other.seed = 12;
    const std::string out3 = tmp_dir("tomosim_sim3");
    run_simulate(other, out3);
    CHECK(read_bytes(out1 + "/tomogram.mrc") != read_bytes(out3 + "/tomogram.mrc"));

    // the tomogram has the configured reconstruction geometry
    const Grid3 tomo = read_mrc(a.tomogram_mrc);
    CHECK(tomo.nx() == 32);
    CHECK(tomo.voxel_size() == doctest::Approx(1.0));

    // reconstruct subcommand reproduces a tomogram from the stack + sidecar
    const std::string out4 = tmp_dir("tomosim_rec");
    ReconConfig rcfg;
    const std::string rec = run_reconstruct(a.tilt_stack_mrc, a.tilt_meta_json, rcfg, out4);
    const Grid3 redo = read_mrc(rec);
    CHECK(redo.nx() == 32);

    fs::remove_all(out1);
    fs::remove_all(out2);
    fs::remove_all(out3);
    fs::remove_all(out4);
}

TEST_CASE("match pipeline: tm-f output is a subset of tm output") {
    // small tomogram with planted spherical particles of two classes
    const std::string dir = tmp_dir("tomosim_match");
    Grid3 tomo(48, 48, 48, 1.0);
    auto add_ball = [&](double cx, double cy, double cz, double r) {
        for (int k = 0; k < 48; ++k)
            for (int j = 0; j < 48; ++j)
                for (int i = 0; i < 48; ++i) {
                    const double d = std::sqrt((i - cx) * (i - cx) + (j - cy) * (j - cy) +
                                               (k - cz) * (k - cz));
                    tomo.at(i, j, k) += 0.5 * (1.0 - std::erf((d - r) / 0.8));
                }
    };
    add_ball(12, 12, 12, 3.0);
    add_ball(30, 30, 30, 3.0);
    add_ball(12, 30, 20, 2.0);
    add_ball(16, 12, 12, 2.0);  // close to the first: tm-f should prune here
    const std::string tomo_path = dir + "/tomo.mrc";
    write_mrc(tomo, tomo_path);

    MatchConfig mc;
    mc.tomogram_path = tomo_path;
    CatalogItemConfig big, small;
    big.class_id = "big";
    big.kind = "blob";
    big.blob_atoms = 400;
    big.blob_radius_A = 30.0;  // ~3 nm
    small.class_id = "small";
    small.kind = "blob";
    small.blob_atoms = 200;
    small.blob_radius_A = 20.0;
    mc.catalog = {big, small};
    mc.angular_step_deg = 90.0;
    mc.top_n = 6;
    mc.detect_fiducials = false;

    const MatchOutputs tm = run_match(mc, dir + "/tm");
    MatchConfig mcf = mc;
    mcf.overlap_filter = true;
    const MatchOutputs tmf = run_match(mcf, dir + "/tmf");

    CHECK(!tm.accepted.empty());
    CHECK(tmf.accepted.size() <= tm.accepted.size());
    std::set<std::array<int, 3>> tm_positions;
    for (const auto& c : tm.accepted) tm_positions.insert(c.position);
    for (const auto& c : tmf.accepted) CHECK(tm_positions.count(c.position) == 1);

    const auto parsed = parse_predictions(read_text_file(tm.predictions_txt));
    CHECK(parsed.entries.size() == tm.accepted.size());
    CHECK(fs::exists(tm.timing_json));
    fs::remove_all(dir);
}

TEST_CASE("evaluate pipeline: perfect predictions and class exclusion") {
    const std::string dir = tmp_dir("tomosim_eval");

    // toy ground truth with an occupancy mask
    IntGrid3 occ(16, 16, 16, 1.0);
    for (int d = 0; d < 3; ++d)
        for (int dj = 0; dj < 3; ++dj)
            for (int di = 0; di < 3; ++di) {
                occ.at(2 + di, 2 + dj, 2 + d) = 1;
                occ.at(10 + di, 10 + dj, 10 + d) = 2;
            }
    write_mrc_labels(occ, dir + "/occ.mrc");
    write_text_file(dir + "/gt.txt", "alpha 3 3 3 0 0 0\nbeta 11 11 11 0 0 0\n");
    write_text_file(dir + "/preds.txt", "alpha 3 3 3 0.9\nbeta 11 11 11 0.8\n");

    EvaluateConfig ec;
    ec.predictions_path = dir + "/preds.txt";
    ec.ground_truth_path = dir + "/gt.txt";
    ec.occupancy_path = dir + "/occ.mrc";
    const EvaluateOutputs out = run_evaluate(ec, dir + "/rep");
    CHECK(out.global.f1 == doctest::Approx(1.0));
    CHECK(out.report.ad == doctest::Approx(0.0));
    CHECK(fs::exists(out.report_txt));
    const std::string json_text = read_text_file(out.report_json);
    CHECK(json_text.find("\"F1\"") != std::string::npos);

    // excluding a class removes it from every table
    EvaluateConfig excl = ec;
    excl.exclusions = {"beta"};
    const EvaluateOutputs out2 = run_evaluate(excl, dir + "/rep2");
    CHECK(out2.report.total_particles == 1);
    CHECK(read_text_file(out2.report_txt).find("beta") == std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("command line: exit codes and usage errors") {
    const std::string bin = TOMOSIM_BIN;
    const std::string dir = tmp_dir("tomosim_cli");
    auto run = [&](const std::string& args) {
        return std::system((bin + " " + args + " > " + dir + "/out.txt 2>&1").c_str());
    };
    CHECK(run("--help") == 0);
    CHECK(run("simulate --badflag") != 0);
    // missing catalog in the config: usage error, nonzero exit
    write_text_file(dir + "/bad.json", "{\"catalog\": [{\"class_id\": \"x\", \"kind\": \"pdb\", "
                                       "\"path\": \"/nonexistent.pdb\"}]}");
    CHECK(run("simulate --config " + dir + "/bad.json --out " + dir + "/o") != 0);
    // unknown config keys are rejected
    write_text_file(dir + "/unknown.json", "{\"catalogue\": []}");
    CHECK(run("simulate --config " + dir + "/unknown.json --out " + dir + "/o2") != 0);

    // describe on a simple xyz file
    write_text_file(dir + "/mol.xyz", "C 0 0 0\nC 3 0 0\nN 0 3 0\nO 0 0 3\nC 2 2 2\n");
    CHECK(run("describe " + dir + "/mol.xyz") == 0);
    const std::string out = read_text_file(dir + "/out.txt");
    CHECK(out.find("sphericity") != std::string::npos);
    fs::remove_all(dir);
}
