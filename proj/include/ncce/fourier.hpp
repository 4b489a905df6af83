#pragma once

#include "ncce/types.hpp"

namespace ncce {

/// Frequencies of the canonical uniform grid: w_g = -pi + 2*pi*g/size,
/// g = 0..size-1 (half-open on [-pi, pi)).
VecR uniform_grid(int size);

/// Evaluate t_g = sum_{n=1..N} coeffs[n-1] * exp(+j * n * w_g) on the uniform
/// grid above, for all g at once. Uses an FFT when size > N, otherwise direct
/// summation. Coefficients are indexed from element 1 to match the steering
/// vector phase ramp.
VecC uniform_grid_transform(const VecC& coeffs, int grid_size);

} // namespace ncce
