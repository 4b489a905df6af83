#include "ncce/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>
#include <thread>

#include "ncce/rng.hpp"

namespace ncce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string canonical_config_string(const TrialConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "n_elements=" << c.n_elements << ";k_paths=" << c.k_paths << ";m=" << c.m
       << ";m_cs=" << c.m_cs << ";min_separation=" << c.resolved_min_separation()
       << ";amplitude_model="
       << (c.amplitude_model == TrialConfig::AmplitudeModel::kUnitModulusRandomPhase
               ? "unit_modulus_random_phase"
               : "complex_gaussian")
       << ";noise_std=" << c.noise_std << ";seed=" << c.seed
       << ";wf.max_iters=" << c.wf.max_iters
       << ";wf.step_scale_max=" << c.wf.step_scale_max
       << ";wf.step_warmup=" << c.wf.step_warmup << ";wf.grad_tol=" << c.wf.grad_tol
       << ";wf.init_power_iters=" << c.wf.init_power_iters
       << ";nomp.grid_oversampling=" << c.nomp.grid_oversampling
       << ";nomp.newton_steps_per_detection=" << c.nomp.newton_steps_per_detection
       << ";nomp.cyclic_rounds=" << c.nomp.cyclic_rounds << ";nomp.stop_mode="
       << (c.nomp.stop_mode == NompOptions::StopMode::kKnownK ? "known_k"
                                                              : "residual_threshold")
       << ";nomp.known_k=" << c.resolved_nomp().known_k
       << ";nomp.tau_rel=" << c.nomp.tau_rel << ";nomp.max_paths=" << c.nomp.max_paths;
    return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

double TrialConfig::resolved_min_separation() const {
    if (min_separation >= 0.0)
        return min_separation;
    return 4.0 * (kTwoPi / static_cast<double>(n_elements));
}

NompOptions TrialConfig::resolved_nomp() const {
    NompOptions o = nomp;
    if (o.stop_mode == NompOptions::StopMode::kKnownK && o.known_k <= 0)
        o.known_k = k_paths;
    if (o.max_paths < o.known_k)
        o.max_paths = o.known_k;
    return o;
}

std::vector<std::string> TrialConfig::validate() const {
    if (n_elements < 2)
        throw ConfigError("config: n_elements must be >= 2");
    if (k_paths < 0)
        throw ConfigError("config: k_paths must be >= 0");
    if (m < 2)
        throw ConfigError("config: m must be >= 2");
    if (m_cs < 1 || m_cs > n_elements)
        throw ConfigError("config: requires 1 <= m_cs <= n_elements");
    if (2 * m_cs > m)
        throw ConfigError("config: requires m >= 2*m_cs");
    if (noise_std < 0.0)
        throw ConfigError("config: noise_std must be >= 0");
    const double sep = resolved_min_separation();
    if (k_paths > 0 && sep * static_cast<double>(k_paths) > kTwoPi)
        throw ConfigError("config: k_paths * min_separation exceeds the frequency circle");
    wf.validate();
    resolved_nomp().validate();

    std::vector<std::string> warnings;
    if (4 * k_paths > m_cs)
        warnings.push_back("m_cs < 4*k_paths: compressive stage is under-resourced");
    return warnings;
}

std::uint64_t TrialConfig::hash() const { return fnv1a(canonical_config_string(*this)); }

SparseChannel draw_channel(const TrialConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, streams::kTrialChannel));
    const double sep = cfg.resolved_min_separation();

    SparseChannel ch;
    ch.array.n_elements = cfg.n_elements;
    ch.array.spacing_over_wavelength = 0.5;

    // Frequencies first (rejection sampling on the circle), amplitudes after:
    // the draw order is part of the reproducibility contract.
    std::vector<double> freqs;
    int attempts = 0;
    while (static_cast<int>(freqs.size()) < cfg.k_paths) {
        if (++attempts > 100000 * std::max(1, cfg.k_paths))
            throw ConfigError("draw_channel: min_separation is infeasible");
        const double w = rng.uniform(-kPi, kPi);
        bool ok = true;
        for (double other : freqs)
            if (spatial_freq_distance(w, other) < sep) {
                ok = false;
                break;
            }
        if (ok)
            freqs.push_back(w);
    }

    for (double w : freqs) {
        PathComponent p;
        p.spatial_freq = wrap_spatial_freq(w);
        if (cfg.amplitude_model == TrialConfig::AmplitudeModel::kUnitModulusRandomPhase) {
            const double phi = rng.uniform(0.0, kTwoPi);
            p.amplitude = cplx(std::cos(phi), std::sin(phi));
        } else {
            p.amplitude = rng.complex_gaussian(1.0 / std::sqrt(2.0));
        }
        ch.paths.push_back(p);
    }
    return ch;
}

namespace {

// Greedy nearest-frequency matching of estimated paths (strongest first)
// to true paths; fills per-true-path pointing losses and frequency errors,
// padding with +inf when too few paths were estimated.
void fill_match_metrics(const SparseChannel& truth,
                        const std::vector<EstimatedPath>& est, TrialRecord& rec) {
    std::vector<bool> used(truth.paths.size(), false);
    rec.loss_all_paths_db.clear();
    rec.freq_errors.clear();

    for (const auto& e : est) { // est is sorted by |amplitude| descending
        int best = -1;
        double best_d = kInf;
        for (std::size_t t = 0; t < truth.paths.size(); ++t) {
            if (used[t])
                continue;
            const double d = spatial_freq_distance(e.spatial_freq,
                                                   truth.paths[t].spatial_freq);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(t);
            }
        }
        if (best < 0)
            break;
        used[static_cast<std::size_t>(best)] = true;
        rec.freq_errors.push_back(best_d);
        rec.loss_all_paths_db.push_back(
            single_path_loss_db(truth.array.n_elements, best_d));
    }
    while (static_cast<int>(rec.freq_errors.size()) < static_cast<int>(truth.paths.size())) {
        rec.freq_errors.push_back(kInf);
        rec.loss_all_paths_db.push_back(kInf);
    }
    rec.freq_err_max = rec.freq_errors.empty()
                           ? kInf
                           : *std::max_element(rec.freq_errors.begin(),
                                               rec.freq_errors.end());
}

TrialRecord make_base_record(const TrialConfig& cfg, int trial_index) {
    TrialRecord rec;
    rec.trial_index = trial_index;
    rec.seed = cfg.seed;
    rec.n = cfg.n_elements;
    rec.k = cfg.k_paths;
    rec.m = cfg.m;
    rec.m_cs = cfg.m_cs;
    rec.config_hash = cfg.hash();
    rec.loss_strongest_db = kInf;
    rec.freq_err_max = kInf;
    return rec;
}

void finalize_record(const TrialConfig& cfg, const SparseChannel& truth,
                     const VecC& h, const EstimateResult& est, TrialRecord& rec) {
    rec.residual_energy_rel = est.residual_energy_rel;
    if (!est.paths.empty() && h.norm() > 0.0) {
        rec.loss_strongest_db = beamforming_loss_db(h, est.paths.front().spatial_freq);
    } else {
        rec.loss_strongest_db = kInf;
    }
    fill_match_metrics(truth, est.paths, rec);
    rec.success_1db = rec.loss_strongest_db <= 1.0;
    (void)cfg;
}

} // namespace

TrialRecord run_trial(const TrialConfig& cfg, int trial_index) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    TrialRecord rec = make_base_record(cfg, trial_index);
    try {
        const SparseChannel truth = draw_channel(cfg);
        const VecC h = synthesize_channel(truth);

        const SensingEnsemble ensemble = build_ensemble(
            cfg.m, cfg.m_cs, cfg.n_elements, derive_seed(cfg.seed, streams::kTrialEnsemble));
        rec.mismatch_fro_rel = ensemble.mismatch_fro_rel;

        Rng noise_rng(derive_seed(cfg.seed, streams::kTrialNoise));
        const RssMeasurements y =
            measure_rss(ensemble.a_final, h, cfg.noise_std, noise_rng);

        const EstimateResult est =
            estimate_noncoherent(y, ensemble, cfg.wf, cfg.resolved_nomp());
        rec.stage1_converged = est.stage1 && est.stage1->converged;
        finalize_record(cfg, truth, h, est, rec);
    } catch (const std::exception& ex) {
        rec.failed = true;
        rec.error = ex.what();
        rec.success_1db = false;
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t_start)
            .count();
    return rec;
}

TrialRecord run_trial_coherent(const TrialConfig& cfg, int trial_index) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    TrialRecord rec = make_base_record(cfg, trial_index);
    rec.m_cs = 0; // no virtual decomposition in the coherent baseline
    try {
        const SparseChannel truth = draw_channel(cfg);
        const VecC h = synthesize_channel(truth);

        // Same quantized-matrix sub-stream as build_ensemble uses for A, so
        // paired runs share beacons.
        Rng rng_a(derive_seed(derive_seed(cfg.seed, streams::kTrialEnsemble),
                              streams::kEnsembleQuantized));
        const MatC a = sample_quantized_matrix(cfg.m, cfg.n_elements, rng_a);

        Rng noise_rng(derive_seed(cfg.seed, streams::kTrialNoise));
        const CoherentMeasurements y = measure_coherent(a, h, cfg.noise_std, noise_rng);

        const EstimateResult est = estimate_coherent(y, a, cfg.resolved_nomp());
        rec.stage1_converged = true; // no stage 1 in the coherent baseline
        finalize_record(cfg, truth, h, est, rec);
    } catch (const std::exception& ex) {
        rec.failed = true;
        rec.error = ex.what();
        rec.success_1db = false;
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t_start)
            .count();
    return rec;
}

std::uint64_t sweep_trial_seed(std::uint64_t base, std::uint64_t axis_tag,
                               std::uint64_t axis_value, std::uint64_t trial) {
    return derive_seed(derive_seed(derive_seed(base, axis_tag), axis_value), trial);
}

void parallel_for_indices(int count, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    const int nthreads = std::min(workers, count);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count)
                    return;
                fn(i);
            }
        });
    for (auto& th : pool)
        th.join();
}

namespace {

SweepPoint aggregate_point(double axis_value, const std::vector<TrialRecord>& records,
                           std::size_t begin, std::size_t end) {
    SweepPoint pt;
    pt.axis_value = axis_value;
    pt.trials = static_cast<int>(end - begin);
    std::vector<double> losses;
    losses.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        losses.push_back(records[i].loss_strongest_db);
        if (records[i].success_1db)
            ++pt.successes;
    }
    const WilsonInterval w = wilson_interval(pt.successes, pt.trials);
    pt.success_rate =
        pt.trials > 0 ? static_cast<double>(pt.successes) / pt.trials : 0.0;
    pt.wilson_lo = w.lo;
    pt.wilson_hi = w.hi;
    pt.mean_loss_db = clamped_mean(losses, kLossCapDb);
    pt.median_loss_db = median(losses);
    return pt;
}

// Run trials_per_point seeded trials of cfg (with per-trial seeds) and append
// records; returns the number of successes at the given loss threshold.
int run_point(const TrialConfig& tmpl, std::uint64_t axis_tag,
              std::uint64_t axis_value, int trials_per_point, EstimatorKind kind,
              double loss_db, int workers, std::vector<TrialRecord>& out) {
    std::vector<TrialRecord> records(static_cast<std::size_t>(trials_per_point));
    parallel_for_indices(trials_per_point, workers, [&](int t) {
        TrialConfig cfg = tmpl;
        cfg.seed = sweep_trial_seed(tmpl.seed, axis_tag, axis_value,
                                    static_cast<std::uint64_t>(t));
        records[static_cast<std::size_t>(t)] =
            kind == EstimatorKind::kNoncoherent ? run_trial(cfg, t)
                                                : run_trial_coherent(cfg, t);
    });
    int successes = 0;
    for (const auto& r : records)
        if (!r.failed && r.loss_strongest_db <= loss_db)
            ++successes;
    out.insert(out.end(), std::make_move_iterator(records.begin()),
               std::make_move_iterator(records.end()));
    return successes;
}

} // namespace

SweepResult sweep_mcs(const TrialConfig& tmpl, const std::vector<int>& mcs_values,
                      int trials_per_point, int workers) {
    if (mcs_values.empty())
        throw ConfigError("sweep_mcs: no m_cs values given");
    SweepResult result;
    result.axis_name = "m_cs";
    for (int mcs : mcs_values) {
        TrialConfig cfg = tmpl;
        cfg.m_cs = mcs;
        cfg.validate();
        const std::size_t begin = result.records.size();
        run_point(cfg, seed_tags::kSweepMcs, static_cast<std::uint64_t>(mcs),
                  trials_per_point, EstimatorKind::kNoncoherent, 1.0, workers,
                  result.records);
        result.points.push_back(aggregate_point(static_cast<double>(mcs),
                                                result.records, begin,
                                                result.records.size()));
    }
    return result;
}

int mcs_heuristic(int n, int k, int m, double c) {
    const int target =
        static_cast<int>(std::lround(c * std::max(1, k) * std::log2(static_cast<double>(n))));
    const int lo = 2 * std::max(1, k) + 1;
    const int hi = std::max(1, m / 2);
    if (hi < lo)
        return hi;
    return std::clamp(target, lo, hi);
}

LadderResult find_min_measurements(const TrialConfig& tmpl, double target_rate,
                                   double loss_db, int trials_per_point,
                                   EstimatorKind kind, int m_cap, int workers) {
    if (!(target_rate >= 0.0 && target_rate < 1.0))
        throw ConfigError("find_min_measurements: target_rate must be in [0, 1)");
    const std::uint64_t tag = kind == EstimatorKind::kNoncoherent
                                  ? seed_tags::kLadderNoncoherent
                                  : seed_tags::kLadderCoherent;

    LadderResult result;
    auto test_m = [&](int m) {
        TrialConfig cfg = tmpl;
        cfg.m = m;
        cfg.m_cs = kind == EstimatorKind::kNoncoherent
                       ? mcs_heuristic(cfg.n_elements, cfg.k_paths, m)
                       : std::max(1, std::min(cfg.n_elements, m / 2));
        cfg.validate();
        const std::size_t begin = result.records.size();
        const int successes =
            run_point(cfg, tag, static_cast<std::uint64_t>(m), trials_per_point, kind,
                      loss_db, workers, result.records);
        LadderPoint pt;
        pt.m = m;
        pt.m_cs = kind == EstimatorKind::kNoncoherent ? cfg.m_cs : 0;
        pt.trials = trials_per_point;
        pt.successes = successes;
        pt.wilson_lo = wilson_interval(successes, trials_per_point).lo;
        pt.passed = pt.wilson_lo >= target_rate;
        result.points.push_back(pt);
        (void)begin;
        return pt.passed;
    };

    // Doubling phase.
    const int m_start = std::max(8, 4 * std::max(1, tmpl.k_paths) + 4);
    int lo = -1;
    int hi = -1;
    for (int m = m_start; m <= m_cap; m *= 2) {
        if (test_m(m)) {
            hi = m;
            break;
        }
        lo = m;
    }
    if (hi < 0) {
        result.found = false; // unreachable at the ladder cap
        result.m_star = -1;
        return result;
    }

    // Bisection phase down to unit resolution.
    while (lo >= 0 && hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (test_m(mid))
            hi = mid;
        else
            lo = mid;
    }

    result.found = true;
    result.m_star = hi;
    return result;
}

ScalingResult sweep_array_size(const TrialConfig& tmpl,
                               const std::vector<int>& n_values,
                               const std::vector<int>& k_values,
                               double target_rate, double loss_db,
                               int trials_per_point, bool paired, int m_cap,
                               int workers) {
    ScalingResult result;
    for (int k : k_values) {
        for (int n : n_values) {
            TrialConfig cfg = tmpl;
            cfg.n_elements = n;
            cfg.k_paths = k;
            ScalingPoint pt;
            pt.n = n;
            pt.k = k;
            pt.noncoherent =
                find_min_measurements(cfg, target_rate, loss_db, trials_per_point,
                                      EstimatorKind::kNoncoherent, m_cap, workers);
            if (paired) {
                pt.coherent =
                    find_min_measurements(cfg, target_rate, loss_db, trials_per_point,
                                          EstimatorKind::kCoherent, m_cap, workers);
                if (pt.noncoherent.found && pt.coherent.found && pt.coherent.m_star > 0)
                    pt.ratio = static_cast<double>(pt.noncoherent.m_star) /
                               static_cast<double>(pt.coherent.m_star);
            }
            result.points.push_back(std::move(pt));
        }
    }
    return result;
}

} // namespace ncce
