#pragma once

#include <vector>

#include "ncce/sensing.hpp"
#include "ncce/types.hpp"

namespace ncce {

/// Wirtinger Flow hyperparameters. The step schedule and iteration budget
/// follow the usual WF recipe; all are exposed for sweeps.
struct WfOptions {
    int max_iters = 2500;
    double step_scale_max = 0.2;  // mu_max
    double step_warmup = 330.0;   // t0 in mu_t = min(1 - exp(-t/t0), mu_max)
    double grad_tol = 1e-8;       // relative gradient stopping threshold
    int init_power_iters = 100;

    void validate() const;
};

struct WfResult {
    VecC estimate;            // y_CS estimate, up to a global phase
    int iterations_used = 0;
    double final_objective = 0.0;
    bool converged = false;
    bool degenerate = false;  // all-zero measurements
    // Objective after each accepted iteration; non-increasing by construction
    // of the backtracking safeguard.
    std::vector<double> objective_history;
};

struct SpectralInit {
    VecC z0;
    bool degenerate = false;
};

/// Leading-eigenvector initialization of Y = (1/M) sum_b y_b r_b^H r_b scaled
/// so ||z0||^2 = M_CS * sum(y) / sum_b ||r_b||^2. Power iteration runs from
/// the normalized all-ones vector, so the result is a deterministic function
/// of the inputs.
SpectralInit spectral_initialize(const MatC& a_pr, const RssMeasurements& y,
                                 const WfOptions& opts);

/// Objective f(z) = (1/2M) sum_b (|r_b.z|^2 - y_b)^2. Row-vector products
/// carry no conjugation (w^T h convention).
double wf_objective(const MatC& a_pr, const RssMeasurements& y, const VecC& z);

/// Wirtinger gradient (1/M) sum_b (|r_b.z|^2 - y_b) (r_b.z) r_b^H.
VecC wf_gradient(const MatC& a_pr, const RssMeasurements& y, const VecC& z);

/// Gradient descent z <- z - (mu_t/||z0||^2) grad f(z) with warmup schedule
/// and a halving backtrack that keeps the objective non-increasing.
WfResult wirtinger_flow(const MatC& a_pr, const RssMeasurements& y,
                        const WfOptions& opts = {});

/// Same, from a caller-supplied starting point (used by equivariance tests).
WfResult wirtinger_flow_with_init(const MatC& a_pr, const RssMeasurements& y,
                                  const VecC& z0, const WfOptions& opts = {});

/// min over phi of ||z_hat - e^{j phi} z_ref||.
double phase_aligned_distance(const VecC& z_hat, const VecC& z_ref);

} // namespace ncce
