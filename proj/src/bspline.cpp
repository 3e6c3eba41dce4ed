#include "tomo/bspline.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tomo/parallel.hpp"

namespace tomo {

namespace {

constexpr double kPole = -0.26794919243112270647;  // sqrt(3) - 2, cubic B-spline pole

double initial_causal(const double* c, int n, size_t stride, double z) {
    // Mirror boundary. Truncate the geometric series when it converges within
    // the signal; otherwise use the exact full-period mirror formula.
    const double tol = 1e-14;
    const int horizon = static_cast<int>(std::ceil(std::log(tol) / std::log(std::abs(z))));
    if (horizon < n) {
        double zk = z;
        double sum = c[0];
        for (int k = 1; k < horizon; ++k) {
            sum += zk * c[static_cast<size_t>(k) * stride];
            zk *= z;
        }
        return sum;
    }
    const double z_n1 = std::pow(z, n - 1);
    double sum = c[0] + z_n1 * c[static_cast<size_t>(n - 1) * stride];
    double zk = z;
    double zk_mirror = z_n1 * z_n1 / z;  // z^(2n-2-k) for k = 1
    for (int k = 1; k < n - 1; ++k) {
        sum += (zk + zk_mirror) * c[static_cast<size_t>(k) * stride];
        zk *= z;
        zk_mirror /= z;
    }
    return sum / (1.0 - z_n1 * z_n1);
}

double initial_anticausal(const double* c, int n, size_t stride, double z) {
    return (z / (z * z - 1.0)) *
           (z * c[static_cast<size_t>(n - 2) * stride] + c[static_cast<size_t>(n - 1) * stride]);
}

void filter_line(double* c, int n, size_t stride) {
    if (n == 1) return;
    const double z = kPole;
    const double lambda = (1.0 - z) * (1.0 - 1.0 / z);
    for (int i = 0; i < n; ++i) c[static_cast<size_t>(i) * stride] *= lambda;
    c[0] = initial_causal(c, n, stride, z);
    for (int i = 1; i < n; ++i)
        c[static_cast<size_t>(i) * stride] += z * c[static_cast<size_t>(i - 1) * stride];
    c[static_cast<size_t>(n - 1) * stride] = initial_anticausal(c, n, stride, z);
    for (int i = n - 2; i >= 0; --i)
        c[static_cast<size_t>(i) * stride] =
            z * (c[static_cast<size_t>(i + 1) * stride] - c[static_cast<size_t>(i) * stride]);
}

inline void cubic_weights(double u, double w[4]) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    w[0] = (1.0 - 3.0 * u + 3.0 * u2 - u3) / 6.0;
    w[1] = (4.0 - 6.0 * u2 + 3.0 * u3) / 6.0;
    w[2] = (1.0 + 3.0 * u + 3.0 * u2 - 3.0 * u3) / 6.0;
    w[3] = u3 / 6.0;
}

inline int mirror(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n - 2;
    i = std::abs(i) % period;
    return i < n ? i : period - i;
}

}  // namespace

Grid3 bspline_prefilter(const Grid3& g) {
    Grid3 c = g;
    const int nx = c.nx(), ny = c.ny(), nz = c.nz();
    double* d = c.data().data();

    parallel_for(0, static_cast<int64_t>(ny) * nz, [&](int64_t jk) {
        const int k = static_cast<int>(jk / ny);
        const int j = static_cast<int>(jk % ny);
        filter_line(d + c.index(0, j, k), nx, 1);
    });
    parallel_for(0, static_cast<int64_t>(nx) * nz, [&](int64_t ik) {
        const int k = static_cast<int>(ik / nx);
        const int i = static_cast<int>(ik % nx);
        filter_line(d + c.index(i, 0, k), ny, static_cast<size_t>(nx));
    });
    if (nz > 1) {
        parallel_for(0, static_cast<int64_t>(nx) * ny, [&](int64_t ij) {
            const int j = static_cast<int>(ij / nx);
            const int i = static_cast<int>(ij % nx);
            filter_line(d + c.index(i, j, 0), nz, static_cast<size_t>(nx) * ny);
        });
    }
    return c;
}

double bspline_eval(const Grid3& coeffs, double x, double y, double z) {
    const int ix = static_cast<int>(std::floor(x));
    const int iy = static_cast<int>(std::floor(y));
    const int iz = static_cast<int>(std::floor(z));
    double wx[4], wy[4], wz[4];
    cubic_weights(x - ix, wx);
    cubic_weights(y - iy, wy);
    cubic_weights(z - iz, wz);

    int xi[4], yi[4], zi[4];
    for (int t = 0; t < 4; ++t) {
        xi[t] = mirror(ix - 1 + t, coeffs.nx());
        yi[t] = mirror(iy - 1 + t, coeffs.ny());
        zi[t] = mirror(iz - 1 + t, coeffs.nz());
    }
    double acc = 0.0;
    for (int c = 0; c < 4; ++c) {
        double accy = 0.0;
        for (int b = 0; b < 4; ++b) {
            double accx = 0.0;
            for (int a = 0; a < 4; ++a) accx += wx[a] * coeffs.at(xi[a], yi[b], zi[c]);
            accy += wy[b] * accx;
        }
        acc += wz[c] * accy;
    }
    return acc;
}

Grid3 rotate_bspline(const Grid3& g, const EulerZXZ& r, const Vec3& center, double fill) {
    return rotate_bspline(g, r.matrix(), center, fill);
}

Grid3 rotate_bspline(const Grid3& g, const Mat3& rot, const Vec3& center, double fill) {
    for (double v : g.data())
        if (!std::isfinite(v)) throw std::invalid_argument("rotate_bspline: non-finite input");

    const Grid3 coeffs = bspline_prefilter(g);
    Grid3 out(g.nx(), g.ny(), g.nz(), g.voxel_size(), g.origin());
    const Mat3 inv = rot.transposed();
    const double h = g.voxel_size();
    const Vec3 o = g.origin();

    parallel_for(0, g.nz(), [&](int64_t kk) {
        const int k = static_cast<int>(kk);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec3 p = g.voxel_center(i, j, k);
                const Vec3 s = inv.apply(p - center) + center;
                // continuous voxel index of the source position
                const double sx = (s[0] - o[0]) / h - 0.5;
                const double sy = (s[1] - o[1]) / h - 0.5;
                const double sz = (s[2] - o[2]) / h - 0.5;
                if (sx < 0.0 || sx > g.nx() - 1 || sy < 0.0 || sy > g.ny() - 1 || sz < 0.0 ||
                    sz > g.nz() - 1) {
                    out.at(i, j, k) = fill;
                } else {
                    out.at(i, j, k) = bspline_eval(coeffs, sx, sy, sz);
                }
            }
    });
    return out;
}

}  // namespace tomo
