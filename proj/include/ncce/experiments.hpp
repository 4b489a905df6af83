#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ncce/channel.hpp"
#include "ncce/estimators.hpp"
#include "ncce/stats.hpp"

namespace ncce {

/// Loss cap (dB) applied when averaging trial losses, so a rare degenerate
/// trial (empty estimate -> infinite loss) cannot blow up a sweep mean. Raw
/// per-trial values are reported uncapped.
inline constexpr double kLossCapDb = 60.0;

/// One seeded Monte Carlo trial configuration. Field names double as the
/// config-file schema (nested options use "wf." / "nomp." prefixes).
struct TrialConfig {
    enum class AmplitudeModel { kUnitModulusRandomPhase, kComplexGaussian };

    int n_elements = 256;
    int k_paths = 1;
    int m = 48;
    int m_cs = 12;
    double min_separation = -1.0; // < 0 means the default 4*(2*pi/N)
    AmplitudeModel amplitude_model = AmplitudeModel::kUnitModulusRandomPhase;
    double noise_std = 0.0;
    WfOptions wf;
    NompOptions nomp; // known_k <= 0 under kKnownK means "use k_paths"
    std::uint64_t seed = 0;

    TrialConfig() { nomp.stop_mode = NompOptions::StopMode::kKnownK; }

    double resolved_min_separation() const;
    NompOptions resolved_nomp() const;

    /// Throws ConfigError on hard violations; returns soft warnings.
    std::vector<std::string> validate() const;

    /// FNV-1a hash of the canonical serialization (stable across runs).
    std::uint64_t hash() const;
};

struct TrialRecord {
    int trial_index = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int k = 0;
    int m = 0;
    int m_cs = 0;
    std::uint64_t config_hash = 0;
    double loss_strongest_db = 0.0;
    std::vector<double> loss_all_paths_db; // per true path via greedy matching
    std::vector<double> freq_errors;       // wrapped |w_hat - w_true| per match
    double freq_err_max = 0.0;
    bool stage1_converged = false;
    bool success_1db = false;
    double wall_ms = 0.0;
    double mismatch_fro_rel = 0.0;
    double residual_energy_rel = 1.0;
    bool failed = false;
    std::string error;
};

/// The true channel drawn for a trial (exposed for diagnostics and tests).
SparseChannel draw_channel(const TrialConfig& cfg);

/// Noncoherent end-to-end trial: channel -> ensemble -> RSS -> two-stage
/// estimate -> beamforming metrics. Estimator failures become failed records,
/// never dropped samples.
TrialRecord run_trial(const TrialConfig& cfg, int trial_index = 0);

/// Coherent baseline trial sharing the channel and the quantized-matrix
/// sub-stream with the noncoherent trial of the same seed. m_cs is reported
/// as 0 since no decomposition is involved.
TrialRecord run_trial_coherent(const TrialConfig& cfg, int trial_index = 0);

struct SweepPoint {
    double axis_value = 0.0;
    int trials = 0;
    int successes = 0;
    double success_rate = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    double mean_loss_db = 0.0;   // capped at kLossCapDb per trial
    double median_loss_db = 0.0;
};

struct SweepResult {
    std::string axis_name;
    std::vector<SweepPoint> points;
    std::vector<TrialRecord> records; // ordered by (point, trial_index)
};

/// Fig. 3 style study: sweep M_CS at fixed (N, K, M).
SweepResult sweep_mcs(const TrialConfig& tmpl, const std::vector<int>& mcs_values,
                      int trials_per_point, int workers = 1);

enum class EstimatorKind { kNoncoherent, kCoherent };

/// M_CS selection used inside the measurement ladder:
/// clamp(round(c*K*log2(N)), 2K+1, M/2).
int mcs_heuristic(int n, int k, int m, double c = 1.5);

struct LadderPoint {
    int m = 0;
    int m_cs = 0;
    int trials = 0;
    int successes = 0;
    double wilson_lo = 0.0;
    bool passed = false;
};

struct LadderResult {
    bool found = false;
    int m_star = -1;
    std::vector<LadderPoint> points;   // in evaluation order
    std::vector<TrialRecord> records;  // ordered by (point, trial_index)
};

/// Smallest tested M whose Wilson lower bound on P(loss <= loss_db) meets
/// target_rate, found by doubling then bisection. Deterministic in the
/// template seed; per-rung trial seeds depend only on (seed, M, trial).
LadderResult find_min_measurements(const TrialConfig& tmpl, double target_rate,
                                   double loss_db, int trials_per_point,
                                   EstimatorKind kind = EstimatorKind::kNoncoherent,
                                   int m_cap = 4096, int workers = 1);

struct ScalingPoint {
    int n = 0;
    int k = 0;
    LadderResult noncoherent;
    LadderResult coherent; // empty unless paired mode
    double ratio = 0.0;    // m*_noncoh / m*_coh when both found
};

struct ScalingResult {
    std::vector<ScalingPoint> points;
};

/// Fig. 4 style study: minimum measurements over an (N, K) grid, optionally
/// paired with the coherent baseline.
ScalingResult sweep_array_size(const TrialConfig& tmpl,
                               const std::vector<int>& n_values,
                               const std::vector<int>& k_values,
                               double target_rate, double loss_db,
                               int trials_per_point, bool paired = false,
                               int m_cap = 4096, int workers = 1);

/// Fixed sub-stream tags for experiment-level seed derivation (documented
/// reproducibility contract).
namespace seed_tags {
inline constexpr std::uint64_t kSweepMcs = 101;
inline constexpr std::uint64_t kLadderNoncoherent = 102;
inline constexpr std::uint64_t kLadderCoherent = 103;
} // namespace seed_tags

/// Per-trial seed inside a sweep: chained derivation from the base seed, an
/// axis tag, the axis value, and the trial index. Independent of evaluation
/// order, so ladders may bisect in any order and replay identically.
std::uint64_t sweep_trial_seed(std::uint64_t base, std::uint64_t axis_tag,
                               std::uint64_t axis_value, std::uint64_t trial);

/// Run fn(i) for i in [0, count) on `workers` threads. Results must be
/// written to per-index slots; scheduling never affects outputs.
void parallel_for_indices(int count, int workers,
                          const std::function<void(int)>& fn);

} // namespace ncce
