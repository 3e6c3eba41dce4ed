#include "tomo/grid.hpp"

#include <algorithm>
#include <cmath>

namespace tomo {

Grid3 bin(const Grid3& g, int factor) {
    if (factor < 1) throw std::invalid_argument("bin: factor must be >= 1");
    if (factor == 1) return g;

    const bool slab = (g.nz() == 1);  // 2D projections bin in x/y only
    auto check = [&](int n, const char* axis) {
        if (n % factor != 0)
            throw std::invalid_argument(std::string("bin: axis ") + axis + " (" +
                                        std::to_string(n) + ") not divisible by factor " +
                                        std::to_string(factor));
    };
    check(g.nx(), "x");
    check(g.ny(), "y");
    if (!slab) check(g.nz(), "z");

    const int onx = g.nx() / factor;
    const int ony = g.ny() / factor;
    const int onz = slab ? 1 : g.nz() / factor;
    const int fz = slab ? 1 : factor;

    Grid3 out(onx, ony, onz, g.voxel_size() * factor, g.origin());
    const double inv = 1.0 / (static_cast<double>(factor) * factor * fz);
    for (int k = 0; k < onz; ++k)
        for (int j = 0; j < ony; ++j)
            for (int i = 0; i < onx; ++i) {
                double s = 0.0;
                for (int dk = 0; dk < fz; ++dk)
                    for (int dj = 0; dj < factor; ++dj)
                        for (int di = 0; di < factor; ++di)
                            s += g.at(i * factor + di, j * factor + dj, k * fz + dk);
                out.at(i, j, k) = s * inv;
            }
    return out;
}

void paste(const Grid3& sub, Grid3& into, std::array<int, 3> offset, PasteMode mode) {
    if (offset[0] < 0 || offset[1] < 0 || offset[2] < 0 ||
        offset[0] + sub.nx() > into.nx() || offset[1] + sub.ny() > into.ny() ||
        offset[2] + sub.nz() > into.nz())
        throw std::out_of_range("paste: subvolume does not fit inside target at offset");

    for (int k = 0; k < sub.nz(); ++k)
        for (int j = 0; j < sub.ny(); ++j)
            for (int i = 0; i < sub.nx(); ++i) {
                double& dst = into.at(i + offset[0], j + offset[1], k + offset[2]);
                if (mode == PasteMode::Add)
                    dst += sub.at(i, j, k);
                else
                    dst = sub.at(i, j, k);
            }
}

double min_value(const Grid3& g) { return *std::min_element(g.data().begin(), g.data().end()); }
double max_value(const Grid3& g) { return *std::max_element(g.data().begin(), g.data().end()); }

double mean_value(const Grid3& g) {
    double s = 0.0;
    for (double v : g.data()) s += v;
    return s / static_cast<double>(g.size());
}

double variance(const Grid3& g) {
    const double m = mean_value(g);
    double s = 0.0;
    for (double v : g.data()) s += (v - m) * (v - m);
    return s / static_cast<double>(g.size());
}

}  // namespace tomo
