#pragma once

#include <optional>
#include <vector>

#include "ncce/phase_retrieval.hpp"
#include "ncce/types.hpp"

namespace ncce {

/// Stopping rule and refinement budget for the Newtonized OMP loop.
struct NompOptions {
    enum class StopMode { kKnownK, kResidualThreshold };

    int grid_oversampling = 4;        // grid size = oversampling * N
    int newton_steps_per_detection = 3;
    int cyclic_rounds = 3;
    StopMode stop_mode = StopMode::kResidualThreshold;
    int known_k = 0;
    double tau_rel = 1e-3;            // residual-to-initial energy threshold
    int max_paths = 8;

    static NompOptions with_known_k(int k) {
        NompOptions o;
        o.stop_mode = StopMode::kKnownK;
        o.known_k = k;
        return o;
    }
    static NompOptions with_residual_threshold(double tau) {
        NompOptions o;
        o.stop_mode = StopMode::kResidualThreshold;
        o.tau_rel = tau;
        return o;
    }

    void validate() const;
};

struct EstimatedPath {
    cplx amplitude{0.0, 0.0};
    double spatial_freq = 0.0;
    int detection_order = 0;
};

struct EstimateResult {
    std::vector<EstimatedPath> paths; // sorted by |amplitude| descending
    double residual_energy_rel = 1.0;
    std::optional<WfResult> stage1;
    double elapsed_seconds = 0.0;
    // Relative residual energy after each detection iteration (post cyclic
    // refinement); non-increasing by construction.
    std::vector<double> residual_history;
};

/// f(w) = A_CS * a(w): beacon-domain response of spatial frequency w.
VecC dictionary_response(const MatC& a_cs, double omega);

/// f'(w) = A_CS * (j * diag(1..N) * a(w)).
VecC dictionary_response_derivative(const MatC& a_cs, double omega);

/// Matched-filter dictionary over a frequency grid, precomputed once per
/// estimation call. The uniform builder takes the FFT fast path.
struct GridDictionary {
    VecR grid;     // ascending frequencies
    MatC f;        // m_cs x grid.size(), column g = f(grid[g])
    VecR norms_sq; // ||f(grid[g])||^2

    static GridDictionary build(const MatC& a_cs, const VecR& grid);
    static GridDictionary build_uniform(const MatC& a_cs, int grid_size);
};

struct GridDetection {
    double omega = 0.0;
    cplx alpha{0.0, 0.0};
    double g_value = 0.0; // G_r at the detected grid point
};

/// argmax over the grid of G_r(w) = |f(w)^H y_r|^2 / ||f(w)||^2 plus the
/// scalar LS amplitude f(w)^H y_r / ||f(w)||^2. Ties go to the smallest w.
/// Returns nullopt on an exactly zero residual (null detection).
std::optional<GridDetection> detect_on_grid(const VecC& y_r, const MatC& a_cs,
                                            const VecR& grid);
std::optional<GridDetection> detect_on_grid(const VecC& y_r,
                                            const GridDictionary& dict);

struct NewtonRefineResult {
    double omega = 0.0;
    cplx alpha{0.0, 0.0};
    bool accepted = false;
};

/// One guarded Newton step on w maximizing G_r: applied only when the
/// curvature is negative and the step strictly increases G_r; the amplitude
/// is re-fit by scalar LS at the final frequency either way.
NewtonRefineResult refine_newton(const VecC& y_r, const MatC& a_cs,
                                 double omega, cplx alpha);

/// Joint least-squares amplitudes for a fixed frequency set. Throws
/// CollisionError when the frequency matrix is numerically rank deficient
/// (near-duplicate frequencies); the caller merges and retries.
VecC fit_amplitudes_ls(const VecC& y, const MatC& a_cs,
                       const std::vector<double>& omegas);

/// Cyclic Newton refinement: per round and per path (in detection order),
/// re-fit that path's frequency against the residual excluding it, then
/// jointly re-fit all amplitudes. Near-duplicate frequencies are merged.
std::vector<EstimatedPath> refine_cyclic(const VecC& y, const MatC& a_cs,
                                         std::vector<EstimatedPath> paths,
                                         int rounds);

/// Full NOMP loop: detect on the oversampled grid, Newton-refine onto the
/// continuum, cyclically re-refine all paths, stop per options.
EstimateResult extract_paths(const VecC& y, const MatC& a_cs,
                             const NompOptions& opts);

} // namespace ncce
