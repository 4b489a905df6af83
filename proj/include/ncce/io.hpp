#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ncce/experiments.hpp"

namespace ncce {

/// Shortest round-trip decimal rendering of a double ("inf"/"nan" for
/// non-finite). Used everywhere numbers reach CSV so re-runs are
/// byte-identical.
std::string format_double(double v);

// Per-trial CSV. Columns:
//   trial_index,seed,n,k,m,m_cs,loss_strongest_db,success_1db,
//   stage1_converged,freq_err_max,wall_ms
std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& rec);
void write_trial_csv(std::ostream& os, const std::vector<TrialRecord>& records);

// Sweep summary CSV. Columns:
//   axis_value,trials,success_rate,wilson_lo,wilson_hi,mean_loss_db,median_loss_db
std::string summary_csv_header();
std::string summary_csv_row(const SweepPoint& pt);
void write_summary_csv(std::ostream& os, const std::vector<SweepPoint>& points);

// Scaling table CSV. Columns: n,k,estimator,m_star,found
void write_scaling_csv(std::ostream& os, const ScalingResult& result);

/// Ladder rungs rendered as summary rows (axis_value = M), aggregated from
/// the ladder's trial records in evaluation order.
std::vector<SweepPoint> ladder_summary_points(const LadderResult& ladder);

// JSON mirrors of the records (full field set, including per-path metrics).
std::string trial_record_json(const TrialRecord& rec, int indent = 2);
std::string records_json(const std::vector<TrialRecord>& records);

/// Parse the key-value config format (one `key = value` per line, `#`
/// comments; keys mirror TrialConfig field names, nested options as
/// `wf.<field>` / `nomp.<field>`). Unknown keys are errors.
TrialConfig parse_config_file(const std::string& path);
TrialConfig parse_config_text(const std::string& text);

/// Canonical config rendering in the same key-value schema.
std::string config_to_text(const TrialConfig& cfg);

} // namespace ncce
