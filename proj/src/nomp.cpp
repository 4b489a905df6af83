#include "ncce/nomp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ncce/channel.hpp"
#include "ncce/fourier.hpp"

namespace ncce {

void NompOptions::validate() const {
    if (grid_oversampling < 2)
        throw ConfigError("NompOptions: grid_oversampling must be >= 2");
    if (cyclic_rounds < 1)
        throw ConfigError("NompOptions: cyclic_rounds must be >= 1");
    if (newton_steps_per_detection < 0)
        throw ConfigError("NompOptions: newton_steps_per_detection must be >= 0");
    if (!(tau_rel > 0.0 && tau_rel < 1.0))
        throw ConfigError("NompOptions: tau_rel must be in (0, 1)");
    if (stop_mode == StopMode::kKnownK && known_k < 0)
        throw ConfigError("NompOptions: known_k must be >= 0");
    if (max_paths < 1)
        throw ConfigError("NompOptions: max_paths must be >= 1");
}

namespace {

VecC steering(int n, double omega) {
    VecC a(n);
    for (int k = 1; k <= n; ++k)
        a[k - 1] = cplx(std::cos(k * omega), std::sin(k * omega));
    return a;
}

// Frequencies closer than this (on the circle) are considered the same atom.
double merge_tolerance(int n) { return (kTwoPi / n) / 8.0; }

} // namespace

VecC dictionary_response(const MatC& a_cs, double omega) {
    return a_cs * steering(static_cast<int>(a_cs.cols()), omega);
}

VecC dictionary_response_derivative(const MatC& a_cs, double omega) {
    const int n = static_cast<int>(a_cs.cols());
    VecC da(n);
    for (int k = 1; k <= n; ++k) {
        cplx e(std::cos(k * omega), std::sin(k * omega));
        da[k - 1] = cplx(0.0, static_cast<double>(k)) * e;
    }
    return a_cs * da;
}

GridDictionary GridDictionary::build(const MatC& a_cs, const VecR& grid) {
    GridDictionary d;
    d.grid = grid;
    const int gs = static_cast<int>(grid.size());
    d.f.resize(a_cs.rows(), gs);
    for (int g = 0; g < gs; ++g)
        d.f.col(g) = dictionary_response(a_cs, grid[g]);
    d.norms_sq = d.f.colwise().squaredNorm();
    return d;
}

GridDictionary GridDictionary::build_uniform(const MatC& a_cs, int grid_size) {
    const int n = static_cast<int>(a_cs.cols());
    if (grid_size <= n)
        return build(a_cs, uniform_grid(grid_size));
    GridDictionary d;
    d.grid = uniform_grid(grid_size);
    d.f.resize(a_cs.rows(), grid_size);
    // Row r of F is the uniform-grid transform of row r of A_CS.
    for (Eigen::Index r = 0; r < a_cs.rows(); ++r) {
        VecC row = a_cs.row(r).transpose();
        d.f.row(r) = uniform_grid_transform(row, grid_size).transpose();
    }
    d.norms_sq = d.f.colwise().squaredNorm();
    return d;
}

std::optional<GridDetection> detect_on_grid(const VecC& y_r,
                                            const GridDictionary& dict) {
    if (dict.grid.size() == 0)
        throw InvalidInputError("detect_on_grid: empty grid");
    if (y_r.squaredNorm() == 0.0)
        return std::nullopt;

    const VecC corr = dict.f.adjoint() * y_r;
    Eigen::Index best = -1;
    double best_g = -1.0;
    for (Eigen::Index g = 0; g < dict.grid.size(); ++g) {
        if (dict.norms_sq[g] <= 0.0)
            continue;
        const double val = std::norm(corr[g]) / dict.norms_sq[g];
        if (val > best_g) { // strict: ties keep the smallest frequency
            best_g = val;
            best = g;
        }
    }
    if (best < 0)
        return std::nullopt;

    GridDetection det;
    det.omega = dict.grid[best];
    det.alpha = corr[best] / dict.norms_sq[best];
    det.g_value = best_g;
    return det;
}

std::optional<GridDetection> detect_on_grid(const VecC& y_r, const MatC& a_cs,
                                            const VecR& grid) {
    return detect_on_grid(y_r, GridDictionary::build(a_cs, grid));
}

namespace {

struct ObjectiveProbe {
    double g = 0.0;   // G_r(w)
    double dg = 0.0;  // first derivative
    double d2g = 0.0; // second derivative
    cplx alpha{0.0, 0.0};
};

// G_r(w) = |f(w)^H y_r|^2 / ||f(w)||^2 with analytical derivatives through
// f'(w) and f''(w).
ObjectiveProbe probe_objective(const VecC& y_r, const MatC& a_cs, double omega) {
    const int n = static_cast<int>(a_cs.cols());
    VecC a(n), da(n), d2a(n);
    for (int k = 1; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const cplx e(std::cos(kk * omega), std::sin(kk * omega));
        a[k - 1] = e;
        da[k - 1] = cplx(0.0, kk) * e;
        d2a[k - 1] = cplx(-kk * kk, 0.0) * e;
    }
    const VecC f = a_cs * a;
    const VecC f1 = a_cs * da;
    const VecC f2 = a_cs * d2a;

    const cplx u = f.dot(y_r);   // f^H y_r
    const cplx u1 = f1.dot(y_r);
    const cplx u2 = f2.dot(y_r);
    const double p = std::norm(u);
    const double p1 = 2.0 * (std::conj(u) * u1).real();
    const double p2 = 2.0 * (std::norm(u1) + (std::conj(u) * u2).real());

    const double nn = f.squaredNorm();
    const double n1 = 2.0 * f.dot(f1).real();
    const double n2 = 2.0 * (f1.squaredNorm() + f.dot(f2).real());

    ObjectiveProbe out;
    if (nn <= 0.0)
        return out;
    out.g = p / nn;
    out.dg = (p1 * nn - p * n1) / (nn * nn);
    out.d2g = (p2 * nn - p * n2) / (nn * nn) -
              2.0 * n1 * (p1 * nn - p * n1) / (nn * nn * nn);
    out.alpha = u / nn;
    return out;
}

double objective_value(const VecC& y_r, const MatC& a_cs, double omega) {
    const VecC f = dictionary_response(a_cs, omega);
    const double nn = f.squaredNorm();
    if (nn <= 0.0)
        return 0.0;
    return std::norm(f.dot(y_r)) / nn;
}

cplx scalar_ls_amplitude(const VecC& y_r, const MatC& a_cs, double omega) {
    const VecC f = dictionary_response(a_cs, omega);
    const double nn = f.squaredNorm();
    if (nn <= 0.0)
        return cplx(0.0, 0.0);
    return f.dot(y_r) / nn;
}

} // namespace

NewtonRefineResult refine_newton(const VecC& y_r, const MatC& a_cs,
                                 double omega, cplx alpha) {
    NewtonRefineResult res;
    res.omega = omega;
    res.alpha = alpha;

    const ObjectiveProbe probe = probe_objective(y_r, a_cs, omega);
    if (probe.d2g < 0.0) {
        const double omega_try = wrap_spatial_freq(omega - probe.dg / probe.d2g);
        const double g_try = objective_value(y_r, a_cs, omega_try);
        if (g_try > probe.g) {
            res.omega = omega_try;
            res.accepted = true;
        }
    }
    res.alpha = scalar_ls_amplitude(y_r, a_cs, res.omega);
    return res;
}

VecC fit_amplitudes_ls(const VecC& y, const MatC& a_cs,
                       const std::vector<double>& omegas) {
    const int k = static_cast<int>(omegas.size());
    if (k == 0)
        return VecC(0);
    if (k > a_cs.rows())
        throw InvalidInputError("fit_amplitudes_ls: more frequencies than measurements");

    MatC f(a_cs.rows(), k);
    for (int i = 0; i < k; ++i)
        f.col(i) = dictionary_response(a_cs, omegas[i]);

    const MatC gram = f.adjoint() * f;
    Eigen::SelfAdjointEigenSolver<MatC> es(gram);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw CollisionError("fit_amplitudes_ls: near-duplicate frequencies");

    Eigen::LLT<MatC> llt(gram);
    if (llt.info() != Eigen::Success)
        throw CollisionError("fit_amplitudes_ls: Gram factorization failed");
    return llt.solve(f.adjoint() * y);
}

namespace {

std::vector<double> frequencies_of(const std::vector<EstimatedPath>& paths) {
    std::vector<double> w;
    w.reserve(paths.size());
    for (const auto& p : paths)
        w.push_back(p.spatial_freq);
    return w;
}

// Merge any pair of paths closer than the tolerance: the stronger path keeps
// its frequency, amplitudes add, the earlier detection order survives.
bool merge_near_duplicates(std::vector<EstimatedPath>& paths, double tol) {
    bool merged_any = false;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = i + 1; j < paths.size();) {
            if (spatial_freq_distance(paths[i].spatial_freq, paths[j].spatial_freq) < tol) {
                if (std::abs(paths[j].amplitude) > std::abs(paths[i].amplitude))
                    paths[i].spatial_freq = paths[j].spatial_freq;
                paths[i].amplitude += paths[j].amplitude;
                paths[i].detection_order =
                    std::min(paths[i].detection_order, paths[j].detection_order);
                paths.erase(paths.begin() + static_cast<std::ptrdiff_t>(j));
                merged_any = true;
            } else {
                ++j;
            }
        }
    }
    return merged_any;
}

// Joint LS with collision fallback: on failure merge the closest pair and
// retry until the system is well posed.
void refit_all_amplitudes(const VecC& y, const MatC& a_cs,
                          std::vector<EstimatedPath>& paths, double tol) {
    while (!paths.empty()) {
        merge_near_duplicates(paths, tol);
        try {
            const VecC alphas = fit_amplitudes_ls(y, a_cs, frequencies_of(paths));
            for (std::size_t i = 0; i < paths.size(); ++i)
                paths[i].amplitude = alphas[static_cast<Eigen::Index>(i)];
            return;
        } catch (const CollisionError&) {
            if (paths.size() < 2)
                throw;
            // Find and merge the closest pair, then retry.
            std::size_t bi = 0, bj = 1;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < paths.size(); ++i)
                for (std::size_t j = i + 1; j < paths.size(); ++j) {
                    const double d =
                        spatial_freq_distance(paths[i].spatial_freq, paths[j].spatial_freq);
                    if (d < best) {
                        best = d;
                        bi = i;
                        bj = j;
                    }
                }
            if (std::abs(paths[bj].amplitude) > std::abs(paths[bi].amplitude))
                paths[bi].spatial_freq = paths[bj].spatial_freq;
            paths[bi].amplitude += paths[bj].amplitude;
            paths[bi].detection_order =
                std::min(paths[bi].detection_order, paths[bj].detection_order);
            paths.erase(paths.begin() + static_cast<std::ptrdiff_t>(bj));
        }
    }
}

VecC model_response(const MatC& a_cs, const std::vector<EstimatedPath>& paths) {
    VecC acc = VecC::Zero(a_cs.rows());
    for (const auto& p : paths)
        acc += p.amplitude * dictionary_response(a_cs, p.spatial_freq);
    return acc;
}

} // namespace

std::vector<EstimatedPath> refine_cyclic(const VecC& y, const MatC& a_cs,
                                         std::vector<EstimatedPath> paths,
                                         int rounds) {
    if (paths.empty())
        return paths;
    const double tol = merge_tolerance(static_cast<int>(a_cs.cols()));

    refit_all_amplitudes(y, a_cs, paths, tol);
    for (int round = 0; round < rounds; ++round) {
        for (std::size_t i = 0; i < paths.size(); ++i) {
            VecC y_r = y;
            for (std::size_t j = 0; j < paths.size(); ++j)
                if (j != i)
                    y_r -= paths[j].amplitude *
                           dictionary_response(a_cs, paths[j].spatial_freq);
            const NewtonRefineResult r =
                refine_newton(y_r, a_cs, paths[i].spatial_freq, paths[i].amplitude);
            paths[i].spatial_freq = r.omega;
            paths[i].amplitude = r.alpha;
            refit_all_amplitudes(y, a_cs, paths, tol);
        }
    }
    return paths;
}

EstimateResult extract_paths(const VecC& y, const MatC& a_cs,
                             const NompOptions& opts) {
    opts.validate();
    const auto t_start = std::chrono::steady_clock::now();

    EstimateResult result;
    const double y_energy = y.squaredNorm();
    const int grid_size = opts.grid_oversampling * static_cast<int>(a_cs.cols());
    const GridDictionary dict = GridDictionary::build_uniform(a_cs, grid_size);

    auto rel_residual = [&](const std::vector<EstimatedPath>& paths) {
        if (y_energy == 0.0)
            return 1.0;
        return (y - model_response(a_cs, paths)).squaredNorm() / y_energy;
    };

    std::vector<EstimatedPath> paths;
    int detections = 0;
    while (true) {
        if (opts.stop_mode == NompOptions::StopMode::kKnownK &&
            static_cast<int>(paths.size()) >= opts.known_k)
            break;
        if (opts.stop_mode == NompOptions::StopMode::kResidualThreshold &&
            !paths.empty() && rel_residual(paths) <= opts.tau_rel)
            break;
        if (static_cast<int>(paths.size()) >= opts.max_paths ||
            detections >= 2 * opts.max_paths)
            break;

        const VecC y_r = y - model_response(a_cs, paths);
        const auto det = detect_on_grid(y_r, dict);
        if (!det) {
            // Null detection: an exactly explained (or zero) measurement.
            break;
        }
        ++detections;

        double omega = det->omega;
        cplx alpha = det->alpha;
        for (int s = 0; s < opts.newton_steps_per_detection; ++s) {
            const NewtonRefineResult r = refine_newton(y_r, a_cs, omega, alpha);
            omega = r.omega;
            alpha = r.alpha;
        }

        EstimatedPath path;
        path.amplitude = alpha;
        path.spatial_freq = omega;
        path.detection_order = detections - 1;
        paths.push_back(path);

        paths = refine_cyclic(y, a_cs, paths, opts.cyclic_rounds);
        result.residual_history.push_back(rel_residual(paths));
    }

    result.residual_energy_rel = rel_residual(paths);
    std::stable_sort(paths.begin(), paths.end(),
                     [](const EstimatedPath& a, const EstimatedPath& b) {
                         return std::abs(a.amplitude) > std::abs(b.amplitude);
                     });
    result.paths = std::move(paths);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

} // namespace ncce
