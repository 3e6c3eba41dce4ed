#include <doctest.h>

#include <cmath>
#include <set>

#include "support/direct_ncc.hpp"
#include "support/util.hpp"
#include "tomo/fft.hpp"
#include "tomo/matcher.hpp"

using namespace tomo;
using testutil::random_grid;

namespace {

/// Spherical mask of the given radius (voxels), hard edge, centered.
Grid3 hard_mask(int n, double radius) {
    Grid3 m(n, n, n, 1.0);
    const double c = (n - 1) / 2.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                m.at(i, j, k) =
                    std::sqrt((i - c) * (i - c) + (j - c) * (j - c) + (k - c) * (k - c)) <=
                            radius
                        ? 1.0
                        : 0.0;
    return m;
}

/// Smooth asymmetric blob so orientation actually matters.
Grid3 asym_blob(int n) {
    Grid3 t(n, n, n, 1.0);
    const double c = (n - 1) / 2.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double dx = i - c, dy = j - c, dz = k - c;
                t.at(i, j, k) = std::exp(-(dx * dx / 8 + dy * dy / 3 + dz * dz / 5)) +
                                0.6 * std::exp(-((dx - 2) * (dx - 2) + dy * dy +
                                                 (dz + 1) * (dz + 1)) /
                                               2.0);
            }
    return t;
}

void plant(Grid3& vol, const Grid3& t, int px, int py, int pz) {
    const int cx = t.nx() / 2, cy = t.ny() / 2, cz = t.nz() / 2;
    for (int k = 0; k < t.nz(); ++k)
        for (int j = 0; j < t.ny(); ++j)
            for (int i = 0; i < t.nx(); ++i)
                vol.at(px + i - cx, py + j - cy, pz + k - cz) += t.at(i, j, k);
}

}  // namespace

TEST_CASE("build_template: mirror symmetry, sampling, lowpass power, mask cover") {
    PotentialMap pm = sphere_potential(3.0, 5.0, 1.0, MoleculeKind::Protein);
    BuildTemplateOptions opt;
    opt.target_voxel_nm = 1.0;
    auto [normal, flipped] = build_template("s", pm, opt);

    CHECK(normal.volume.voxel_size() == doctest::Approx(1.0));
    CHECK(flipped.handedness == Handedness::Flipped);
    // a sphere is mirror symmetric: both handedness copies agree
    for (size_t i = 0; i < normal.volume.size(); ++i)
        CHECK(std::abs(normal.volume[i] - flipped.volume[i]) < 1e-9);

    // mask covers the template support
    const double peak =
        std::max(std::abs(max_value(normal.volume)), std::abs(min_value(normal.volume)));
    for (size_t i = 0; i < normal.volume.size(); ++i)
        if (std::abs(normal.volume[i]) > 1e-3 * peak) CHECK(normal.mask[i] > 0.99);

    // low-pass removes > 99% of the power above the cutoff
    BuildTemplateOptions nolp = opt;
    nolp.lowpass_nm = 1e-3;  // effectively disabled
    auto [raw, raw_f] = build_template("s", pm, nolp);
    const double q_cut = 1.0 / opt.lowpass_nm;
    auto power_above = [&](const Grid3& g) {
        const ComplexGrid3 spec = dft3(g);
        double p = 0;
        const int nx = g.nx(), ny = g.ny(), nz = g.nz();
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const double q = std::sqrt(std::pow(fft_freq(i, nx, 1.0), 2) +
                                               std::pow(fft_freq(j, ny, 1.0), 2) +
                                               std::pow(fft_freq(k, nz, 1.0), 2));
                    if (q > q_cut) p += std::norm(spec.at(i, j, k));
                }
        return p;
    };
    CHECK(power_above(normal.volume) < 0.01 * power_above(raw.volume));
}

TEST_CASE("ncc: fourier path equals the direct sliding-window oracle") {
    Rng seeds(2024);
    for (int trial = 0; trial < 5; ++trial) {
        const int nv = 10 + trial % 3;
        const int nt = 5 + trial % 2;
        const Grid3 vol = random_grid(nv, nv, nv, seeds.next_u64());
        const Grid3 tpl = random_grid(nt, nt, nt, seeds.next_u64());
        const Grid3 mask = hard_mask(nt, nt / 2.0);

        const NccResult fast = ncc_search(vol, tpl, mask, {EulerZXZ{0, 0, 0}});
        // identity rotation passes through the b-spline resampler; compare
        // against the oracle on the identical rotated template
        const Grid3 direct = testutil::direct_masked_ncc(vol, tpl, mask);
        for (size_t i = 0; i < fast.scores.size(); ++i)
            CHECK(fast.scores[i] == doctest::Approx(direct[i]).epsilon(1e-6));
    }
}

TEST_CASE("ncc: planted template recovered with score near one") {
    const Grid3 tpl = asym_blob(11);
    const Grid3 mask = hard_mask(11, 5.2);
    Grid3 vol(40, 40, 40, 1.0);
    plant(vol, tpl, 23, 17, 11);

    const std::vector<EulerZXZ> orientations{{0, 0, 0}, {90, 45, 0}, {30, 120, 60}};
    const NccResult res = ncc_search(vol, tpl, mask, orientations);

    size_t arg = 0;
    for (size_t i = 0; i < res.scores.size(); ++i)
        if (res.scores[i] > res.scores[arg]) arg = i;
    const int bi = static_cast<int>(arg % 40);
    const int bj = static_cast<int>((arg / 40) % 40);
    const int bk = static_cast<int>(arg / (40 * 40));
    CHECK(bi == 23);
    CHECK(bj == 17);
    CHECK(bk == 11);
    CHECK(res.scores[arg] >= 0.999);
    CHECK(res.best_orientation[arg] == 0);

    // scores bounded
    for (size_t i = 0; i < res.scores.size(); ++i) {
        CHECK(res.scores[i] <= 1.0);
        CHECK(res.scores[i] >= -1.0);
    }
}

TEST_CASE("ncc: white-noise volumes stay well below a planted-match score") {
    const Grid3 tpl = random_grid(16, 16, 16, 77);
    const Grid3 mask = hard_mask(16, 7.5);
    for (int trial = 0; trial < 10; ++trial) {
        const Grid3 vol = random_grid(48, 48, 48, 100 + trial);
        const NccResult res = ncc_search(vol, tpl, mask, {EulerZXZ{0, 0, 0}});
        CHECK(max_value(res.scores) < 0.5);
    }
}

TEST_CASE("ncc: invariant to affine intensity transforms of the tomogram") {
    const Grid3 tpl = asym_blob(9);
    const Grid3 mask = hard_mask(9, 4.2);
    const Grid3 vol = random_grid(24, 24, 24, 55);
    Grid3 affine = vol;
    for (auto& v : affine.data()) v = 3.7 * v + 11.0;
    const NccResult a = ncc_search(vol, tpl, mask, {EulerZXZ{0, 0, 0}});
    const NccResult b = ncc_search(affine, tpl, mask, {EulerZXZ{0, 0, 0}});
    for (size_t i = 0; i < a.scores.size(); ++i)
        CHECK(std::abs(a.scores[i] - b.scores[i]) < 1e-6);
}

TEST_CASE("candidate extraction: separation, exclusion, exhaustion, ordering") {
    NccResult res;
    res.scores = Grid3(20, 20, 20, 1.0);
    res.best_orientation = IntGrid3(20, 20, 20, 1.0);
    res.scores.at(4, 4, 4) = 0.9;
    res.scores.at(15, 15, 15) = 0.7;

    auto two = extract_candidates(res, "c", 2, 3.0);
    REQUIRE(two.size() == 2);
    CHECK(two[0].position == std::array<int, 3>{4, 4, 4});
    CHECK(two[0].score == doctest::Approx(0.9));
    CHECK(two[1].position == std::array<int, 3>{15, 15, 15});

    // peaks one voxel apart with exclusion 5: only the higher survives
    NccResult close;
    close.scores = Grid3(16, 16, 16, 1.0);
    close.best_orientation = IntGrid3(16, 16, 16, 1.0);
    close.scores.at(8, 8, 8) = 0.8;
    close.scores.at(9, 8, 8) = 0.75;
    auto kept = extract_candidates(close, "c", 10, 5.0);
    // the weaker peak one voxel away is suppressed and nothing else is
    // positive, so exactly one candidate comes back
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].position == std::array<int, 3>{8, 8, 8});

    // n beyond the voxel count exhausts early
    NccResult tiny;
    tiny.scores = Grid3(4, 4, 4, 1.0);
    tiny.best_orientation = IntGrid3(4, 4, 4, 1.0);
    tiny.scores.at(1, 1, 1) = 0.5;
    auto all = extract_candidates(tiny, "c", 1000, 1.5);
    CHECK(all.size() < 1000);

    // scores non-increasing
    for (size_t i = 1; i < all.size(); ++i) CHECK(all[i].score <= all[i - 1].score);
}

TEST_CASE("handedness merge keeps the higher score at coincident positions") {
    Candidate a;
    a.class_id = "c";
    a.position = {3, 3, 3};
    a.score = 0.6;
    a.handedness = Handedness::Normal;
    Candidate b = a;
    b.score = 0.8;
    b.handedness = Handedness::Flipped;
    Candidate c;
    c.class_id = "c";
    c.position = {10, 3, 3};
    c.score = 0.7;
    const auto merged = merge_candidates({a, c}, {b});
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].score == doctest::Approx(0.8));
    CHECK(merged[0].handedness == Handedness::Flipped);
    CHECK(merged[1].score == doctest::Approx(0.7));
}

TEST_CASE("fit_threshold: gaussian scores give mu - 2 sigma") {
    Rng rng(8);
    std::vector<double> scores;
    for (int i = 0; i < 1000; ++i) scores.push_back(0.30 + 0.05 * rng.normal());
    const ScoreThreshold t = fit_threshold(scores);
    CHECK(t.cutoff == doctest::Approx(0.20).epsilon(0.05));
    CHECK(std::abs(t.cutoff - 0.20) <= 0.01);
}

TEST_CASE("fit_threshold: identical scores fall back to sample statistics") {
    std::vector<double> scores(50, 0.42);
    const ScoreThreshold t = fit_threshold(scores);
    CHECK(t.fallback);
    CHECK(t.mu == doctest::Approx(0.42));
    CHECK(t.cutoff == doctest::Approx(0.42));
    // boundary kept: identical scores survive their own cutoff
    Candidate c;
    c.score = 0.42;
    CHECK(apply_threshold({c}, t.cutoff).size() == 1);
}

TEST_CASE("fit_threshold: bimodal mixture isolates the upper mode") {
    Rng rng(9);
    std::vector<double> scores;
    for (int i = 0; i < 300; ++i) scores.push_back(0.10 + 0.03 * rng.normal());
    for (int i = 0; i < 700; ++i) scores.push_back(0.40 + 0.02 * rng.normal());
    const ScoreThreshold t = fit_threshold(scores);
    CHECK(t.cutoff > 0.3);
    CHECK(t.mu == doctest::Approx(0.40).epsilon(0.05));
}

TEST_CASE("fit_threshold requires 20 candidates") {
    std::vector<double> few(19, 0.5);
    CHECK_THROWS_AS(fit_threshold(few), std::invalid_argument);
}

TEST_CASE("overlap filter: pair suppression, boundary rule, class priority") {
    auto cand = [](const char* cls, int x, double score) {
        Candidate c;
        c.class_id = cls;
        c.position = {x, 0, 0};
        c.score = score;
        return c;
    };
    std::map<std::string, double> radii{{"a", 3.0}, {"b", 2.0}, {"c", 1.0}};

    // same class, distance 4 < 2r = 6: the higher score survives
    auto kept = overlap_filter({cand("a", 0, 0.5), cand("a", 4, 0.9)}, radii, {"a"});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].position[0] == 4);

    // distance exactly the radius sum is kept (strict inequality)
    auto both = overlap_filter({cand("a", 0, 0.9), cand("a", 6, 0.5)}, radii, {"a"});
    CHECK(both.size() == 2);

    // hand-simulated 3-class scenario, priority a > b > c:
    //   a@10 accepted; b@14 (dist 4 < 3+2) dropped; b@20 accepted;
    //   c@16 (dist to b@20 is 4 >= 2+1... 4 > 3 kept; dist to a@10 is 6 >= 4 kept)
    //   c@21 (dist 1 < 2+1 to b@20) dropped
    auto multi = overlap_filter({cand("c", 16, 0.8), cand("c", 21, 0.9), cand("b", 14, 0.7),
                                 cand("b", 20, 0.6), cand("a", 10, 0.9)},
                                radii, {"a", "b", "c"});
    std::set<std::pair<std::string, int>> got;
    for (const auto& k : multi) got.insert({k.class_id, k.position[0]});
    const std::set<std::pair<std::string, int>> expect{{"a", 10}, {"b", 20}, {"c", 16}};
    CHECK(got == expect);
}

TEST_CASE("log detector: planted beads, empty volume, nine beads") {
    const double r_bead = 5.0;
    auto add_bead = [&](Grid3& vol, double cx, double cy, double cz) {
        for (int k = 0; k < vol.nz(); ++k)
            for (int j = 0; j < vol.ny(); ++j)
                for (int i = 0; i < vol.nx(); ++i) {
                    const double d =
                        std::sqrt((i - cx) * (i - cx) + (j - cy) * (j - cy) + (k - cz) * (k - cz));
                    vol.at(i, j, k) += 0.5 * (1.0 - std::erf((d - r_bead) / 1.0));
                }
    };

    Grid3 one(48, 48, 48, 1.0);
    add_bead(one, 30, 18, 25);
    const auto hits = log_fiducial_detect(one);
    REQUIRE(hits.size() == 1);
    CHECK(std::abs(hits[0][0] - 30) <= 1);
    CHECK(std::abs(hits[0][1] - 18) <= 1);
    CHECK(std::abs(hits[0][2] - 25) <= 1);

    CHECK(log_fiducial_detect(Grid3(24, 24, 24, 1.0)).empty());

    Grid3 nine(64, 64, 64, 1.0);
    int expected = 0;
    for (int bx = 0; bx < 3; ++bx)
        for (int by = 0; by < 3 && expected < 9; ++by) {
            add_bead(nine, 14.0 + 18 * bx, 14.0 + 18 * by, 20.0 + 8 * ((bx + by) % 3));
            ++expected;
        }
    CHECK(log_fiducial_detect(nine).size() == 9);
}

TEST_CASE("so3 grid: identity present, sane size") {
    const auto grid = so3_grid(60.0);
    bool has_identity = false;
    for (const auto& e : grid)
        if (e.phi == 0 && e.theta == 0 && e.psi == 0) has_identity = true;
    CHECK(has_identity);
    CHECK(grid.size() > 10);
    CHECK(grid.size() < 200);
    CHECK(so3_grid(30.0).size() > grid.size());
}
