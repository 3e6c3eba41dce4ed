#include "tomo/shape.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "tomo/euler.hpp"

namespace tomo {

namespace {

struct P3 {
    double x, y, z;
};

inline P3 lerp(const P3& a, const P3& b, double va, double vb, double level) {
    const double t = (level - va) / (vb - va);
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
}

inline double tri_area(const P3& a, const P3& b, const P3& c) {
    const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
    const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
    const double cx = uy * vz - uz * vy;
    const double cy = uz * vx - ux * vz;
    const double cz = ux * vy - uy * vx;
    return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

/// Isosurface area inside one tetrahedron with linear interpolation along edges.
double tetra_area(const P3 p[4], const double v[4], double level) {
    int inside = 0, in_idx[4], out_idx[4];
    int ni = 0, no = 0;
    for (int i = 0; i < 4; ++i) {
        if (v[i] > level) {
            in_idx[ni++] = i;
            ++inside;
        } else {
            out_idx[no++] = i;
        }
    }
    if (inside == 0 || inside == 4) return 0.0;
    if (inside == 1 || inside == 3) {
        // one vertex separated: single triangle against the other three
        const int a = (inside == 1) ? in_idx[0] : out_idx[0];
        int others[3], n = 0;
        for (int i = 0; i < 4; ++i)
            if (i != a) others[n++] = i;
        const P3 q0 = lerp(p[a], p[others[0]], v[a], v[others[0]], level);
        const P3 q1 = lerp(p[a], p[others[1]], v[a], v[others[1]], level);
        const P3 q2 = lerp(p[a], p[others[2]], v[a], v[others[2]], level);
        return tri_area(q0, q1, q2);
    }
    // two in, two out: quad split into two triangles
    const int a = in_idx[0], b = in_idx[1], c = out_idx[0], d = out_idx[1];
    const P3 qac = lerp(p[a], p[c], v[a], v[c], level);
    const P3 qad = lerp(p[a], p[d], v[a], v[d], level);
    const P3 qbc = lerp(p[b], p[c], v[b], v[c], level);
    const P3 qbd = lerp(p[b], p[d], v[b], v[d], level);
    return tri_area(qac, qad, qbd) + tri_area(qac, qbd, qbc);
}

// Six tetrahedra per cube, all sharing the 0-6 diagonal; consistent across cubes.
constexpr int kTets[6][4] = {{0, 5, 1, 6}, {0, 1, 2, 6}, {0, 2, 3, 6},
                             {0, 3, 7, 6}, {0, 7, 4, 6}, {0, 4, 5, 6}};
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

}  // namespace

double sphericity(double volume, double area) {
    return std::cbrt(kPi) * std::pow(6.0 * volume, 2.0 / 3.0) / area;
}

double effective_radius(double volume, double area) { return 3.0 * volume / area; }

double isosurface_area(const Grid3& g, double level) {
    const double h = g.voxel_size();
    // March over an index range padded by one so blobs touching the boundary
    // close; outside samples read as below the level.
    auto sample = [&](int i, int j, int k) -> double {
        if (!g.contains(i, j, k)) return level - 1.0;
        return g.at(i, j, k);
    };
    double area = 0.0;
    for (int k = -1; k < g.nz(); ++k)
        for (int j = -1; j < g.ny(); ++j)
            for (int i = -1; i < g.nx(); ++i) {
                double v[8];
                P3 p[8];
                bool any_in = false, any_out = false;
                for (int c = 0; c < 8; ++c) {
                    const int ci = i + kCorner[c][0];
                    const int cj = j + kCorner[c][1];
                    const int ck = k + kCorner[c][2];
                    v[c] = sample(ci, cj, ck);
                    p[c] = {ci * h, cj * h, ck * h};
                    (v[c] > level ? any_in : any_out) = true;
                }
                if (!any_in || !any_out) continue;
                for (const auto& t : kTets) {
                    const P3 tp[4] = {p[t[0]], p[t[1]], p[t[2]], p[t[3]]};
                    const double tv[4] = {v[t[0]], v[t[1]], v[t[2]], v[t[3]]};
                    area += tetra_area(tp, tv, level);
                }
            }
    return area;
}

ShapeDescriptors shape_descriptors(const Grid3& g, double threshold) {
    const double peak = max_value(g);
    if (!(peak > 0)) throw std::runtime_error("shape_descriptors: non-positive density grid");
    Grid3 norm = g;
    for (auto& v : norm.data()) v /= peak;

    size_t count = 0;
    for (double v : norm.data())
        if (v > threshold) ++count;
    if (count == 0) throw std::runtime_error("shape_descriptors: nothing above threshold");

    const double h = g.voxel_size();
    ShapeDescriptors d;
    d.volume = static_cast<double>(count) * h * h * h;
    d.area = isosurface_area(norm, threshold);
    d.sphericity = sphericity(d.volume, d.area);
    d.eff_radius = effective_radius(d.volume, d.area);
    return d;
}

}  // namespace tomo
