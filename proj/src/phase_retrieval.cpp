#include "ncce/phase_retrieval.hpp"

#include <cmath>

namespace ncce {

void WfOptions::validate() const {
    if (max_iters <= 0 || step_scale_max <= 0.0 || step_warmup <= 0.0 ||
        grad_tol <= 0.0 || init_power_iters <= 0)
        throw ConfigError("WfOptions: all fields must be positive");
}

SpectralInit spectral_initialize(const MatC& a_pr, const RssMeasurements& y,
                                 const WfOptions& opts) {
    opts.validate();
    const int m = static_cast<int>(a_pr.rows());
    const int m_cs = static_cast<int>(a_pr.cols());
    if (y.values.size() != m)
        throw InvalidInputError("spectral_initialize: dimension mismatch");
    if (m < 2 * m_cs)
        throw InvalidInputError("spectral_initialize: requires M >= 2*M_CS");

    SpectralInit init;
    const double y_sum = y.values.sum();
    if (y_sum == 0.0) {
        init.z0 = VecC::Zero(m_cs);
        init.degenerate = true;
        return init;
    }

    // Y = (1/M) A^H diag(y) A, Hermitian PSD.
    const MatC ymat =
        (a_pr.adjoint() * y.values.asDiagonal() * a_pr) / static_cast<double>(m);

    // Power iteration from a fixed start so stage 1 is deterministic.
    VecC v = VecC::Constant(m_cs, cplx(1.0, 0.0));
    v /= v.norm();
    for (int it = 0; it < opts.init_power_iters; ++it) {
        VecC w = ymat * v;
        double nw = w.norm();
        if (nw == 0.0)
            break;
        v = w / nw;
    }

    const double rows_sq = a_pr.squaredNorm(); // sum_b ||r_b||^2
    const double lambda = std::sqrt(static_cast<double>(m_cs) * y_sum / rows_sq);
    init.z0 = lambda * v;
    return init;
}

double wf_objective(const MatC& a_pr, const RssMeasurements& y, const VecC& z) {
    const VecC u = a_pr * z;
    const VecR err = u.cwiseAbs2() - y.values;
    return err.squaredNorm() / (2.0 * static_cast<double>(a_pr.rows()));
}

VecC wf_gradient(const MatC& a_pr, const RssMeasurements& y, const VecC& z) {
    if (a_pr.cols() != z.size() || a_pr.rows() != y.values.size())
        throw InvalidInputError("wf_gradient: dimension mismatch");
    const VecC u = a_pr * z;
    VecC weighted(u.size());
    for (Eigen::Index b = 0; b < u.size(); ++b)
        weighted[b] = (std::norm(u[b]) - y.values[b]) * u[b];
    return (a_pr.adjoint() * weighted) / static_cast<double>(a_pr.rows());
}

WfResult wirtinger_flow_with_init(const MatC& a_pr, const RssMeasurements& y,
                                  const VecC& z0, const WfOptions& opts) {
    opts.validate();
    WfResult res;

    const double z0_norm = z0.norm();
    if (z0_norm == 0.0) {
        res.estimate = z0;
        res.degenerate = true;
        res.final_objective = wf_objective(a_pr, y, z0);
        return res;
    }
    const double inv_z0_sq = 1.0 / (z0_norm * z0_norm);
    // Normalizer for the stopping rule; scales as ||z||^3 under y -> c*y so
    // the rule is invariant to measurement scale.
    const double grad_scale = z0_norm * z0_norm * z0_norm;

    VecC z = z0;
    double f = wf_objective(a_pr, y, z);
    res.objective_history.reserve(64);
    res.objective_history.push_back(f);
    for (int t = 1; t <= opts.max_iters; ++t) {
        const VecC g = wf_gradient(a_pr, y, z);
        if (g.norm() / grad_scale < opts.grad_tol) {
            res.converged = true;
            break;
        }
        double mu = std::min(1.0 - std::exp(-static_cast<double>(t) / opts.step_warmup),
                             opts.step_scale_max);
        bool stepped = false;
        for (int h = 0; h <= 10; ++h) {
            VecC z_try = z - (mu * inv_z0_sq) * g;
            const double f_try = wf_objective(a_pr, y, z_try);
            if (f_try <= f) {
                z = std::move(z_try);
                f = f_try;
                stepped = true;
                break;
            }
            mu *= 0.5;
        }
        res.iterations_used = t;
        res.objective_history.push_back(f);
        if (!stepped) {
            // Cannot descend even at the smallest step: numerically stationary.
            res.converged = g.norm() / grad_scale < std::sqrt(opts.grad_tol);
            break;
        }
    }
    if (!res.converged && res.iterations_used == opts.max_iters) {
        const VecC g = wf_gradient(a_pr, y, z);
        res.converged = g.norm() / grad_scale < opts.grad_tol;
    }

    res.estimate = std::move(z);
    res.final_objective = f;
    return res;
}

WfResult wirtinger_flow(const MatC& a_pr, const RssMeasurements& y,
                        const WfOptions& opts) {
    SpectralInit init = spectral_initialize(a_pr, y, opts);
    if (init.degenerate) {
        WfResult res;
        res.estimate = init.z0;
        res.degenerate = true;
        res.final_objective = wf_objective(a_pr, y, init.z0);
        return res;
    }
    return wirtinger_flow_with_init(a_pr, y, init.z0, opts);
}

double phase_aligned_distance(const VecC& z_hat, const VecC& z_ref) {
    if (z_hat.size() != z_ref.size())
        throw InvalidInputError("phase_aligned_distance: length mismatch");
    const double a = z_hat.squaredNorm();
    const double b = z_ref.squaredNorm();
    const double c = std::abs(z_hat.dot(z_ref)); // dot() conjugates z_hat
    const double d2 = a + b - 2.0 * c;
    return std::sqrt(d2 > 0.0 ? d2 : 0.0);
}

} // namespace ncce
