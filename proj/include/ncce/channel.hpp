#pragma once

#include <vector>

#include "ncce/types.hpp"

namespace ncce {

/// Uniform linear array described by its element count and normalized
/// spacing d/lambda. Paths are parameterized by spatial frequency
/// w = 2*pi*(d/lambda)*sin(theta) rather than by angle.
struct ArrayConfig {
    int n_elements = 0;
    double spacing_over_wavelength = 0.5;

    void validate() const;
};

/// One propagation path: complex amplitude and spatial frequency in [-pi, pi).
struct PathComponent {
    cplx amplitude{0.0, 0.0};
    double spatial_freq = 0.0;
};

/// K-sparse spatial channel over a linear array.
struct SparseChannel {
    std::vector<PathComponent> paths;
    ArrayConfig array;
};

/// Wrap a spatial frequency into the half-open interval [-pi, pi);
/// +pi maps to -pi.
double wrap_spatial_freq(double omega);

/// Absolute wrapped distance between two spatial frequencies (on the circle).
double spatial_freq_distance(double a, double b);

/// Steering vector a(w): element n (1-indexed) equals exp(j*n*w). Norm is
/// sqrt(N) since every entry has unit modulus.
VecC steering_vector(const ArrayConfig& array, double omega);

/// Element-wise derivative d a(w)/dw = j * diag(1..N) * a(w).
VecC steering_vector_derivative(const ArrayConfig& array, double omega);

/// w = 2*pi*(d/lambda)*sin(theta), wrapped to [-pi, pi). Requires |theta| <= pi/2.
double spatial_freq_from_angle(double theta, double spacing_over_wavelength);

/// h = sum_k alpha_k a(w_k). Empty path list gives the zero vector.
VecC synthesize_channel(const SparseChannel& channel);

/// Single-beam array gain toward w: |a(w)^H h|.
double beam_gain(const VecC& h, double omega);

struct BeamSearchResult {
    double omega_opt = 0.0;
    double gain_opt = 0.0;
};

/// Best single-beam steering direction and gain for channel h, found by a
/// dense grid (grid_mult*N points) followed by a guarded Newton polish.
/// Throws InvalidInputError on a zero channel.
BeamSearchResult best_single_beam_gain(const VecC& h, int grid_mult = 32,
                                       int newton_iters = 20);

/// Beamforming loss in dB of steering at omega_hat instead of the optimum:
/// 20*log10(gain_opt / |a(omega_hat)^H h|). Returns +inf when the steered
/// gain is exactly zero.
double beamforming_loss_db(const VecC& h, double omega_hat);

/// Secondary metric: loss relative to maximum ratio transmission,
/// 20*log10(sqrt(N)*||h|| / |a(omega_hat)^H h|). Always >= the single-beam
/// loss is not implied; MRT is a stricter reference.
double beamforming_loss_vs_mrt_db(const VecC& h, double omega_hat);

/// |D_N(delta)| = |sum_{n=1..N} exp(j*n*delta)| evaluated stably
/// (Dirichlet kernel magnitude; equals N at delta = 0).
double dirichlet_magnitude(int n_elements, double delta);

/// Pointing loss of a single path when steering delta away from it:
/// 20*log10(N / |D_N(delta)|).
double single_path_loss_db(int n_elements, double delta);

} // namespace ncce
