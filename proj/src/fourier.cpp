#include "ncce/fourier.hpp"

#include <unsupported/Eigen/FFT>

namespace ncce {

VecR uniform_grid(int size) {
    VecR grid(size);
    for (int g = 0; g < size; ++g)
        grid[g] = -kPi + kTwoPi * static_cast<double>(g) / static_cast<double>(size);
    return grid;
}

VecC uniform_grid_transform(const VecC& coeffs, int grid_size) {
    const int n = static_cast<int>(coeffs.size());
    const int gs = grid_size;
    if (gs > n) {
        // With w_g = -pi + 2*pi*g/G, exp(j*n*w_g) = (-1)^n exp(j*2*pi*n*g/G),
        // so the transform is an (unnormalized) inverse DFT of the
        // sign-flipped, zero-padded coefficient sequence.
        std::vector<cplx> padded(static_cast<std::size_t>(gs), cplx(0.0, 0.0));
        for (int k = 1; k <= n; ++k) {
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            padded[static_cast<std::size_t>(k)] = sign * coeffs[k - 1];
        }
        Eigen::FFT<double> fft;
        std::vector<cplx> out(static_cast<std::size_t>(gs));
        fft.inv(out, padded);
        VecC result(gs);
        for (int g = 0; g < gs; ++g)
            result[g] = out[static_cast<std::size_t>(g)] * static_cast<double>(gs);
        return result;
    }
    // Coarse grids: direct evaluation with a phasor recurrence.
    VecC result(gs);
    for (int g = 0; g < gs; ++g) {
        double w = -kPi + kTwoPi * static_cast<double>(g) / static_cast<double>(gs);
        const cplx step(std::cos(w), std::sin(w));
        cplx phase = step; // exp(j*1*w)
        cplx acc(0.0, 0.0);
        for (int k = 0; k < n; ++k) {
            acc += coeffs[k] * phase;
            phase *= step;
        }
        result[g] = acc;
    }
    return result;
}

} // namespace ncce
