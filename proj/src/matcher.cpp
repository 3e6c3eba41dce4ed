#include "tomo/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "tomo/bspline.hpp"
#include "tomo/fft.hpp"
#include "tomo/parallel.hpp"

namespace tomo {

namespace {

Grid3 resample_to(const Grid3& g, double target_voxel_nm) {
    const double ratio = target_voxel_nm / g.voxel_size();
    const int f = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - f) < 1e-9 && f >= 1) {
        if (f == 1) return g;
        // trim to divisible dims before binning
        const int nx = g.nx() / f * f, ny = g.ny() / f * f, nz = g.nz() / f * f;
        if (nx == g.nx() && ny == g.ny() && nz == g.nz()) return bin(g, f);
        Grid3 t(nx, ny, nz, g.voxel_size(), g.origin());
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) t.at(i, j, k) = g.at(i, j, k);
        return bin(t, f);
    }
    // general ratio: prefiltered B-spline resampling
    const Grid3 coeffs = bspline_prefilter(g);
    const int nx = std::max(1, static_cast<int>(std::floor(g.nx() / ratio)));
    const int ny = std::max(1, static_cast<int>(std::floor(g.ny() / ratio)));
    const int nz = std::max(1, static_cast<int>(std::floor(g.nz() / ratio)));
    Grid3 out(nx, ny, nz, target_voxel_nm, g.origin());
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double sx = (i + 0.5) * ratio - 0.5;
                const double sy = (j + 0.5) * ratio - 0.5;
                const double sz = (k + 0.5) * ratio - 0.5;
                out.at(i, j, k) = bspline_eval(coeffs, std::min(sx, g.nx() - 1.0),
                                               std::min(sy, g.ny() - 1.0),
                                               std::min(sz, g.nz() - 1.0));
            }
    return out;
}

/// Embed a template into an N-sized array so circular correlation scores refer
/// to the template center: w_big[(d - tc) mod N] = w[d].
ComplexGrid3 embed_centered(const Grid3& t, int nx, int ny, int nz) {
    ComplexGrid3 big(nx, ny, nz, 1.0);
    const int cx = t.nx() / 2, cy = t.ny() / 2, cz = t.nz() / 2;
    for (int k = 0; k < t.nz(); ++k)
        for (int j = 0; j < t.ny(); ++j)
            for (int i = 0; i < t.nx(); ++i) {
                const int bi = ((i - cx) % nx + nx) % nx;
                const int bj = ((j - cy) % ny + ny) % ny;
                const int bk = ((k - cz) % nz + nz) % nz;
                big.at(bi, bj, bk) = t.at(i, j, k);
            }
    return big;
}

/// Circular cross-correlation corr(f, w)(p) = sum_x f(x) w_big(x - p) via the
/// precomputed unitary spectrum of f.
Grid3 correlate(const ComplexGrid3& f_spec, const Grid3& w, int nx, int ny, int nz) {
    ComplexGrid3 w_spec = dft3(embed_centered(w, nx, ny, nz));
    for (size_t i = 0; i < w_spec.size(); ++i)
        w_spec[i] = f_spec[i] * std::conj(w_spec[i]);
    Grid3 out = idft3(w_spec);
    const double root_n = std::sqrt(static_cast<double>(out.size()));
    for (auto& v : out.data()) v *= root_n;
    return out;
}

}  // namespace

std::pair<TemplateSpec, TemplateSpec> build_template(const std::string& class_id,
                                                     const PotentialMap& potential,
                                                     const BuildTemplateOptions& opt) {
    Grid3 t = resample_to(potential.v_el, opt.target_voxel_nm);

    // radial CTF modulation and gaussian low-pass in Fourier space
    ComplexGrid3 spec = dft3(t);
    const double defocus_nm = opt.defocus_um * 1.0e3;
    const double q_cut = 1.0 / opt.lowpass_nm;
    const double sigma_q = q_cut / 3.0;  // amplitude ~e-4.5 at the cutoff
    const int nx = t.nx(), ny = t.ny(), nz = t.nz();
    const double h = t.voxel_size();
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double q = std::sqrt(std::pow(fft_freq(i, nx, h), 2) +
                                           std::pow(fft_freq(j, ny, h), 2) +
                                           std::pow(fft_freq(k, nz, h), 2));
                const double lp = std::exp(-q * q / (2.0 * sigma_q * sigma_q));
                spec.at(i, j, k) *= ctf_value(opt.optics, defocus_nm, q) * lp;
            }
    t = idft3(spec);

    // spherical mask reaching past the template support
    const double peak = std::max(std::abs(max_value(t)), std::abs(min_value(t)));
    const Vec3 c = t.box_center();
    double support_r = 0.0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (std::abs(t.at(i, j, k)) > 1e-3 * peak)
                    support_r = std::max(support_r, norm(t.voxel_center(i, j, k) - c));
    const double mask_r = support_r + 2.0 * h;
    const double edge = 1.5 * h;
    Grid3 mask(nx, ny, nz, h);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double r = norm(mask.voxel_center(i, j, k) - c);
                mask.at(i, j, k) =
                    r <= mask_r ? 1.0 : std::exp(-(r - mask_r) * (r - mask_r) / (2 * edge * edge));
            }

    TemplateSpec normal;
    normal.class_id = class_id;
    normal.volume = t;
    normal.mask = mask;
    normal.mask_radius_nm = mask_r;
    normal.handedness = Handedness::Normal;

    TemplateSpec flipped = normal;
    flipped.handedness = Handedness::Flipped;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) flipped.volume.at(i, j, k) = t.at(nx - 1 - i, j, k);
    return {normal, flipped};
}

NccResult ncc_search(const Grid3& tomogram, const Grid3& tmpl, const Grid3& mask,
                     const std::vector<EulerZXZ>& orientations) {
    if (tmpl.nx() > tomogram.nx() || tmpl.ny() > tomogram.ny() || tmpl.nz() > tomogram.nz())
        throw std::invalid_argument("ncc_search: template larger than tomogram");
    if (!tmpl.same_shape(mask)) throw std::invalid_argument("ncc_search: template/mask mismatch");
    if (orientations.empty()) throw std::invalid_argument("ncc_search: no orientations");

    const int nx = tomogram.nx(), ny = tomogram.ny(), nz = tomogram.nz();
    const size_t nvox = tomogram.size();

    const ComplexGrid3 f_spec = dft3(tomogram);
    Grid3 f2 = tomogram;
    for (auto& v : f2.data()) v *= v;
    const ComplexGrid3 f2_spec = dft3(f2);

    double nm = 0.0;
    for (double v : mask.data()) nm += v;
    if (nm <= 0) throw std::invalid_argument("ncc_search: empty mask");

    // local statistics under the (unrotated, spherical) mask
    const Grid3 sum_f = correlate(f_spec, mask, nx, ny, nz);
    const Grid3 sum_f2 = correlate(f2_spec, mask, nx, ny, nz);
    Grid3 local_sd(nx, ny, nz, tomogram.voxel_size());
    const double var_floor = 1e-8 * std::max(variance(tomogram), 1e-30);
    for (size_t i = 0; i < nvox; ++i) {
        const double mu = sum_f[i] / nm;
        const double var = sum_f2[i] / nm - mu * mu;
        local_sd[i] = var > var_floor ? std::sqrt(var) : 0.0;
    }

    NccResult res;
    res.scores = Grid3(nx, ny, nz, tomogram.voxel_size());
    res.scores.fill(-2.0);
    res.best_orientation = IntGrid3(nx, ny, nz, tomogram.voxel_size());

    std::vector<Grid3> per_orientation(orientations.size());
    parallel_for(0, static_cast<int64_t>(orientations.size()), [&](int64_t oi) {
        const Grid3 rot =
            rotate_bspline(tmpl, orientations[oi], tmpl.box_center(), 0.0);
        double sum_t = 0.0, sum_t2 = 0.0;
        for (size_t i = 0; i < rot.size(); ++i) {
            sum_t += mask[i] * rot[i];
            sum_t2 += mask[i] * rot[i] * rot[i];
        }
        const double mu_t = sum_t / nm;
        const double sd_t = std::sqrt(std::max(0.0, sum_t2 / nm - mu_t * mu_t));

        Grid3 scores(nx, ny, nz, tomogram.voxel_size());
        if (sd_t <= 0) {
            per_orientation[oi] = std::move(scores);  // constant template: all zero
            return;
        }
        Grid3 w = rot;
        for (size_t i = 0; i < w.size(); ++i) w[i] = mask[i] * (rot[i] - mu_t);
        const Grid3 num = correlate(f_spec, w, nx, ny, nz);
        for (size_t i = 0; i < nvox; ++i) {
            const double denom = nm * local_sd[i] * sd_t;
            scores[i] = local_sd[i] > 0 ? std::clamp(num[i] / denom, -1.0, 1.0) : 0.0;
        }
        per_orientation[oi] = std::move(scores);
    });

    // ordered merge keeps ties on the lower orientation index
    for (size_t oi = 0; oi < orientations.size(); ++oi) {
        const Grid3& s = per_orientation[oi];
        for (size_t i = 0; i < nvox; ++i)
            if (s[i] > res.scores[i]) {
                res.scores[i] = s[i];
                res.best_orientation[i] = static_cast<int32_t>(oi);
            }
    }
    return res;
}

std::vector<Candidate> extract_candidates(const NccResult& result, const std::string& class_id,
                                          int n, double exclusion_radius_vox,
                                          Handedness handedness, double min_score) {
    const Grid3& s = result.scores;
    const int nx = s.nx(), ny = s.ny(), nz = s.nz();

    using Entry = std::pair<double, size_t>;  // (score, flat index)
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;  // lower index wins ties
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (size_t i = 0; i < s.size(); ++i)
        if (s[i] > min_score) heap.push({s[i], i});

    std::vector<char> suppressed(s.size(), 0);
    std::vector<Candidate> out;
    const int r = static_cast<int>(std::ceil(exclusion_radius_vox));
    const double r2 = exclusion_radius_vox * exclusion_radius_vox;

    while (static_cast<int>(out.size()) < n && !heap.empty()) {
        const auto [score, idx] = heap.top();
        heap.pop();
        if (suppressed[idx]) continue;
        const int i = static_cast<int>(idx % nx);
        const int j = static_cast<int>((idx / nx) % ny);
        const int k = static_cast<int>(idx / (static_cast<size_t>(nx) * ny));
        Candidate c;
        c.class_id = class_id;
        c.position = {i, j, k};
        c.orientation = result.best_orientation[idx];
        c.score = score;
        c.handedness = handedness;
        out.push_back(c);
        for (int dk = -r; dk <= r; ++dk)
            for (int dj = -r; dj <= r; ++dj)
                for (int di = -r; di <= r; ++di) {
                    if (di * di + dj * dj + dk * dk > r2) continue;
                    const int pi = i + di, pj = j + dj, pk = k + dk;
                    if (pi < 0 || pi >= nx || pj < 0 || pj >= ny || pk < 0 || pk >= nz) continue;
                    suppressed[s.index(pi, pj, pk)] = 1;
                }
    }
    return out;
}

std::vector<Candidate> merge_candidates(const std::vector<Candidate>& a,
                                        const std::vector<Candidate>& b) {
    std::map<std::array<int, 3>, Candidate> best;
    for (const auto* list : {&a, &b})
        for (const auto& c : *list) {
            auto it = best.find(c.position);
            if (it == best.end() || c.score > it->second.score) best[c.position] = c;
        }
    std::vector<Candidate> out;
    out.reserve(best.size());
    for (auto& [pos, c] : best) out.push_back(c);
    std::stable_sort(out.begin(), out.end(),
                     [](const Candidate& x, const Candidate& y) { return x.score > y.score; });
    return out;
}

ScoreThreshold fit_threshold(const std::vector<double>& scores, int n_bins) {
    if (scores.size() < 20)
        throw std::invalid_argument("fit_threshold: need at least 20 candidate scores");

    const auto [mn_it, mx_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *mn_it, hi = *mx_it;

    auto sample_stats = [&](double a, double b, ScoreThreshold& t) {
        double sum = 0, sum2 = 0;
        int64_t cnt = 0;
        for (double s : scores)
            if (s >= a && s <= b) {
                sum += s;
                sum2 += s * s;
                ++cnt;
            }
        if (cnt == 0) {
            for (double s : scores) {
                sum += s;
                sum2 += s * s;
            }
            cnt = static_cast<int64_t>(scores.size());
        }
        t.mu = sum / cnt;
        t.sigma = std::sqrt(std::max(0.0, sum2 / cnt - t.mu * t.mu));
        t.cutoff = t.mu - 2.0 * t.sigma;
        t.fallback = true;
    };

    ScoreThreshold t;
    if (hi - lo < 1e-12) {  // all identical
        t.mu = lo;
        t.sigma = 0.0;
        t.cutoff = lo;
        t.fallback = true;
        return t;
    }

    const double bw = (hi - lo) / n_bins;
    std::vector<double> count(n_bins, 0.0);
    for (double s : scores) {
        int b = static_cast<int>((s - lo) / bw);
        if (b >= n_bins) b = n_bins - 1;
        count[b] += 1.0;
    }

    // highest-count local maximum; ties prefer the upper mode
    int mode = 0;
    double mode_count = -1;
    for (int b = 0; b < n_bins; ++b) {
        const double l = b > 0 ? count[b - 1] : -1;
        const double r = b + 1 < n_bins ? count[b + 1] : -1;
        if (count[b] >= l && count[b] >= r && count[b] >= mode_count) {
            mode = b;
            mode_count = count[b];
        }
    }

    // mode window: expand while the bins stay above a tenth of the peak, so
    // counting noise inside the mode does not truncate the fit support
    int w_lo = mode, w_hi = mode;
    const double floor_count = std::max(1.0, 0.1 * mode_count);
    while (w_lo > 0 && count[w_lo - 1] >= floor_count) --w_lo;
    while (w_hi + 1 < n_bins && count[w_hi + 1] >= floor_count) ++w_hi;

    // weighted log-parabola least squares: ln y ~ a + b x + c x^2, weights y^2
    double S[5] = {0, 0, 0, 0, 0};
    double T0 = 0, T1 = 0, T2 = 0;
    int used = 0;
    for (int b = w_lo; b <= w_hi; ++b) {
        if (count[b] <= 0) continue;
        const double x = lo + (b + 0.5) * bw;
        const double y = count[b];
        const double w2 = y * y;
        const double ly = std::log(y);
        double xp = 1.0;
        for (double& s : S) {
            s += w2 * xp;
            xp *= x;
        }
        T0 += w2 * ly;
        T1 += w2 * ly * x;
        T2 += w2 * ly * x * x;
        ++used;
    }

    bool ok = used >= 3;
    double mu = 0, sigma = 0;
    if (ok) {
        // solve the 3x3 normal equations by Cramer's rule
        const double A[3][3] = {{S[0], S[1], S[2]}, {S[1], S[2], S[3]}, {S[2], S[3], S[4]}};
        const double rhs[3] = {T0, T1, T2};
        auto det3 = [](const double m[3][3]) {
            return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        };
        const double d = det3(A);
        if (std::abs(d) < 1e-30) {
            ok = false;
        } else {
            double m1[3][3], m2[3][3];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) {
                    m1[r][c] = c == 1 ? rhs[r] : A[r][c];
                    m2[r][c] = c == 2 ? rhs[r] : A[r][c];
                }
            const double bque = det3(m1) / d;
            const double cque = det3(m2) / d;
            if (cque < 0) {
                mu = -bque / (2.0 * cque);
                sigma = std::sqrt(-1.0 / (2.0 * cque));
            } else {
                ok = false;
            }
        }
    }

    const double window_lo = lo + w_lo * bw;
    const double window_hi = lo + (w_hi + 1) * bw;
    if (!ok || !std::isfinite(mu) || !std::isfinite(sigma) || sigma < 1e-9 ||
        mu < lo - (hi - lo) || mu > hi + (hi - lo)) {
        sample_stats(window_lo, window_hi, t);
        return t;
    }
    t.mu = mu;
    t.sigma = sigma;
    t.cutoff = mu - 2.0 * sigma;
    return t;
}

std::vector<Candidate> apply_threshold(const std::vector<Candidate>& candidates, double cutoff) {
    std::vector<Candidate> out;
    for (const auto& c : candidates)
        if (c.score >= cutoff) out.push_back(c);
    return out;
}

std::vector<Candidate> overlap_filter(const std::vector<Candidate>& candidates,
                                      const std::map<std::string, double>& radius_by_class_vox,
                                      const std::vector<std::string>& class_order) {
    std::vector<std::string> order = class_order;
    for (const auto& c : candidates)
        if (std::find(order.begin(), order.end(), c.class_id) == order.end())
            order.push_back(c.class_id);

    struct Accepted {
        std::array<int, 3> pos;
        double radius;
    };
    std::vector<Accepted> accepted;
    std::vector<Candidate> out;
    for (const auto& cls : order) {
        auto it = radius_by_class_vox.find(cls);
        const double r_self = it != radius_by_class_vox.end() ? it->second : 0.0;
        std::vector<Candidate> of_class;
        for (const auto& c : candidates)
            if (c.class_id == cls) of_class.push_back(c);
        std::stable_sort(of_class.begin(), of_class.end(),
                         [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
        for (const auto& c : of_class) {
            bool drop = false;
            for (const auto& a : accepted) {
                const double dx = c.position[0] - a.pos[0];
                const double dy = c.position[1] - a.pos[1];
                const double dz = c.position[2] - a.pos[2];
                const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                if (dist < r_self + a.radius) {  // strict: exactly touching is kept
                    drop = true;
                    break;
                }
            }
            if (!drop) {
                accepted.push_back({c.position, r_self});
                out.push_back(c);
            }
        }
    }
    return out;
}

std::vector<std::array<int, 3>> log_fiducial_detect(const Grid3& tomogram,
                                                    const LogDetectOptions& opt) {
    const int nx = tomogram.nx(), ny = tomogram.ny(), nz = tomogram.nz();
    const double h = tomogram.voxel_size();
    const double sigma = opt.sigma_vox * h;

    ComplexGrid3 spec = dft3(tomogram);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double q2 = std::pow(fft_freq(i, nx, h), 2) +
                                  std::pow(fft_freq(j, ny, h), 2) +
                                  std::pow(fft_freq(k, nz, h), 2);
                // -(laplacian of gaussian): positive response on bright blobs
                double w = 4.0 * kPi * kPi * q2 * std::exp(-2.0 * kPi * kPi * sigma * sigma * q2);
                if (!opt.bright_blobs) w = -w;
                spec.at(i, j, k) *= w;
            }
    const Grid3 resp = idft3(spec);

    const double peak = max_value(resp);
    if (!(peak > 0)) return {};
    const double level = opt.min_response_frac * peak;

    std::vector<std::array<int, 3>> hits;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double v = resp.at(i, j, k);
                if (!(v > level)) continue;
                bool is_max = true;
                for (int dk = -1; dk <= 1 && is_max; ++dk)
                    for (int dj = -1; dj <= 1 && is_max; ++dj)
                        for (int di = -1; di <= 1 && is_max; ++di) {
                            if (!di && !dj && !dk) continue;
                            const int pi = i + di, pj = j + dj, pk = k + dk;
                            if (pi < 0 || pi >= nx || pj < 0 || pj >= ny || pk < 0 || pk >= nz)
                                continue;
                            if (resp.at(pi, pj, pk) > v) is_max = false;
                        }
                if (is_max) hits.push_back({i, j, k});
            }
    return hits;
}

std::vector<EulerZXZ> so3_grid(double step_deg) {
    if (!(step_deg > 0)) throw std::invalid_argument("so3_grid: step must be positive");
    std::vector<EulerZXZ> out;
    const int n_theta = static_cast<int>(std::lround(180.0 / step_deg));
    for (int it = 0; it <= n_theta; ++it) {
        const double theta = 180.0 * it / n_theta;
        const double s = std::sin(deg2rad(theta));
        const int n_phi = std::max(1, static_cast<int>(std::lround(360.0 * s / step_deg)));
        const int n_psi = std::max(1, static_cast<int>(std::lround(360.0 / step_deg)));
        for (int ip = 0; ip < n_phi; ++ip)
            for (int is = 0; is < n_psi; ++is)
                out.push_back({360.0 * ip / n_phi, theta, 360.0 * is / n_psi});
    }
    return out;
}

std::string format_predictions(const std::vector<Candidate>& candidates) {
    std::ostringstream out;
    out.precision(6);
    for (const auto& c : candidates)
        out << c.class_id << ' ' << c.position[0] << ' ' << c.position[1] << ' '
            << c.position[2] << ' ' << c.score << '\n';
    return out.str();
}

}  // namespace tomo
