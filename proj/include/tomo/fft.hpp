#pragma once

#include "tomo/grid.hpp"

namespace tomo {

/// Unitary-convention discrete Fourier transforms (both directions scaled by
/// 1/sqrt(N)), so Parseval holds without bookkeeping and idft3(dft3(g)) == g.
/// 2D slabs (nz == 1) transform in x/y only.
ComplexGrid3 dft3(const Grid3& g);
ComplexGrid3 dft3(const ComplexGrid3& g);
Grid3 idft3(const ComplexGrid3& G);
ComplexGrid3 idft3_complex(const ComplexGrid3& G);

/// Frequency (cycles per length unit) of FFT bin i along an axis of n samples
/// spaced by h; bins above n/2 map to negative frequencies.
double fft_freq(int i, int n, double h);

}  // namespace tomo
