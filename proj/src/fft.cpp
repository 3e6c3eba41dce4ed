#include "tomo/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace tomo {

namespace {

// FFTW planning is not thread safe; execution on distinct buffers is.
std::mutex g_plan_mutex;

void run_fftw(const std::complex<double>* in, std::complex<double>* out, int nx, int ny, int nz,
              int sign) {
    // FFTW wants row-major dims slowest-first; our layout is x-fastest => (nz, ny, nx).
    fftw_complex* fin = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in));
    fftw_complex* fout = reinterpret_cast<fftw_complex*>(out);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        // FFTW_ESTIMATE keeps planning deterministic and leaves the input intact.
        if (nz == 1)
            plan = fftw_plan_dft_2d(ny, nx, fin, fout, sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
        else
            plan = fftw_plan_dft_3d(nz, ny, nx, fin, fout, sign,
                                    FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        fftw_destroy_plan(plan);
    }
}

ComplexGrid3 transform(const ComplexGrid3& g, int sign) {
    ComplexGrid3 out(g.nx(), g.ny(), g.nz(), g.voxel_size(), g.origin());
    run_fftw(g.data().data(), out.data().data(), g.nx(), g.ny(), g.nz(), sign);
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
    for (auto& v : out.data()) v *= scale;
    return out;
}

}  // namespace

ComplexGrid3 dft3(const Grid3& g) {
    ComplexGrid3 c(g.nx(), g.ny(), g.nz(), g.voxel_size(), g.origin());
    for (size_t i = 0; i < g.size(); ++i) c[i] = g[i];
    return transform(c, FFTW_FORWARD);
}

ComplexGrid3 dft3(const ComplexGrid3& g) { return transform(g, FFTW_FORWARD); }

ComplexGrid3 idft3_complex(const ComplexGrid3& G) { return transform(G, FFTW_BACKWARD); }

Grid3 idft3(const ComplexGrid3& G) {
    ComplexGrid3 c = transform(G, FFTW_BACKWARD);
    Grid3 out(G.nx(), G.ny(), G.nz(), G.voxel_size(), G.origin());
    for (size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

double fft_freq(int i, int n, double h) {
    const int k = (i <= n / 2) ? i : i - n;
    return static_cast<double>(k) / (static_cast<double>(n) * h);
}

}  // namespace tomo
