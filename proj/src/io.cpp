#include "ncce/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ncce {

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trial_csv_header() {
    return "trial_index,seed,n,k,m,m_cs,loss_strongest_db,success_1db,"
           "stage1_converged,freq_err_max,wall_ms";
}

std::string trial_csv_row(const TrialRecord& r) {
    std::ostringstream os;
    os << r.trial_index << ',' << r.seed << ',' << r.n << ',' << r.k << ',' << r.m
       << ',' << r.m_cs << ',' << format_double(r.loss_strongest_db) << ','
       << (r.success_1db ? 1 : 0) << ',' << (r.stage1_converged ? 1 : 0) << ','
       << format_double(r.freq_err_max) << ',' << format_double(r.wall_ms);
    return os.str();
}

void write_trial_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
    os << trial_csv_header() << '\n';
    for (const auto& r : records)
        os << trial_csv_row(r) << '\n';
}

std::string summary_csv_header() {
    return "axis_value,trials,success_rate,wilson_lo,wilson_hi,mean_loss_db,"
           "median_loss_db";
}

std::string summary_csv_row(const SweepPoint& pt) {
    std::ostringstream os;
    os << format_double(pt.axis_value) << ',' << pt.trials << ','
       << format_double(pt.success_rate) << ',' << format_double(pt.wilson_lo) << ','
       << format_double(pt.wilson_hi) << ',' << format_double(pt.mean_loss_db) << ','
       << format_double(pt.median_loss_db);
    return os.str();
}

void write_summary_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
    os << summary_csv_header() << '\n';
    for (const auto& pt : points)
        os << summary_csv_row(pt) << '\n';
}

void write_scaling_csv(std::ostream& os, const ScalingResult& result) {
    os << "n,k,estimator,m_star,found\n";
    for (const auto& pt : result.points) {
        os << pt.n << ',' << pt.k << ",noncoherent," << pt.noncoherent.m_star << ','
           << (pt.noncoherent.found ? 1 : 0) << '\n';
        if (!pt.coherent.points.empty() || pt.coherent.found)
            os << pt.n << ',' << pt.k << ",coherent," << pt.coherent.m_star << ','
               << (pt.coherent.found ? 1 : 0) << '\n';
    }
}

std::vector<SweepPoint> ladder_summary_points(const LadderResult& ladder) {
    std::vector<SweepPoint> points;
    std::size_t cursor = 0;
    for (const auto& rung : ladder.points) {
        SweepPoint pt;
        pt.axis_value = static_cast<double>(rung.m);
        pt.trials = rung.trials;
        pt.successes = rung.successes;
        pt.success_rate =
            rung.trials > 0 ? static_cast<double>(rung.successes) / rung.trials : 0.0;
        const WilsonInterval w = wilson_interval(rung.successes, rung.trials);
        pt.wilson_lo = w.lo;
        pt.wilson_hi = w.hi;
        std::vector<double> losses;
        for (int t = 0; t < rung.trials && cursor < ladder.records.size(); ++t, ++cursor)
            losses.push_back(ladder.records[cursor].loss_strongest_db);
        pt.mean_loss_db = clamped_mean(losses, kLossCapDb);
        pt.median_loss_db = median(losses);
        points.push_back(pt);
    }
    return points;
}

namespace {

nlohmann::json record_to_json(const TrialRecord& r) {
    nlohmann::json j;
    j["trial_index"] = r.trial_index;
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["k"] = r.k;
    j["m"] = r.m;
    j["m_cs"] = r.m_cs;
    j["config_hash"] = r.config_hash;
    j["loss_strongest_db"] = r.loss_strongest_db;
    j["loss_all_paths_db"] = r.loss_all_paths_db;
    j["freq_errors"] = r.freq_errors;
    j["freq_err_max"] = r.freq_err_max;
    j["stage1_converged"] = r.stage1_converged;
    j["success_1db"] = r.success_1db;
    j["wall_ms"] = r.wall_ms;
    j["mismatch_fro_rel"] = r.mismatch_fro_rel;
    j["residual_energy_rel"] = r.residual_energy_rel;
    j["failed"] = r.failed;
    j["error"] = r.error;
    return j;
}

} // namespace

std::string trial_record_json(const TrialRecord& rec, int indent) {
    return record_to_json(rec).dump(indent);
}

std::string records_json(const std::vector<TrialRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records)
        arr.push_back(record_to_json(r));
    return arr.dump(2);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long i = std::stoull(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config: bad seed value for " + key + ": '" + v + "'");
    }
}

void apply_key(TrialConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n_elements")
        cfg.n_elements = static_cast<int>(parse_int(key, value));
    else if (key == "k_paths")
        cfg.k_paths = static_cast<int>(parse_int(key, value));
    else if (key == "m")
        cfg.m = static_cast<int>(parse_int(key, value));
    else if (key == "m_cs")
        cfg.m_cs = static_cast<int>(parse_int(key, value));
    else if (key == "min_separation")
        cfg.min_separation = parse_double(key, value);
    else if (key == "amplitude_model") {
        if (value == "unit_modulus_random_phase")
            cfg.amplitude_model = TrialConfig::AmplitudeModel::kUnitModulusRandomPhase;
        else if (value == "complex_gaussian")
            cfg.amplitude_model = TrialConfig::AmplitudeModel::kComplexGaussian;
        else
            throw ConfigError("config: unknown amplitude_model '" + value + "'");
    } else if (key == "noise_std")
        cfg.noise_std = parse_double(key, value);
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "wf.max_iters")
        cfg.wf.max_iters = static_cast<int>(parse_int(key, value));
    else if (key == "wf.step_scale_max")
        cfg.wf.step_scale_max = parse_double(key, value);
    else if (key == "wf.step_warmup")
        cfg.wf.step_warmup = parse_double(key, value);
    else if (key == "wf.grad_tol")
        cfg.wf.grad_tol = parse_double(key, value);
    else if (key == "wf.init_power_iters")
        cfg.wf.init_power_iters = static_cast<int>(parse_int(key, value));
    else if (key == "nomp.grid_oversampling")
        cfg.nomp.grid_oversampling = static_cast<int>(parse_int(key, value));
    else if (key == "nomp.newton_steps_per_detection")
        cfg.nomp.newton_steps_per_detection = static_cast<int>(parse_int(key, value));
    else if (key == "nomp.cyclic_rounds")
        cfg.nomp.cyclic_rounds = static_cast<int>(parse_int(key, value));
    else if (key == "nomp.stop_mode") {
        if (value == "known_k")
            cfg.nomp.stop_mode = NompOptions::StopMode::kKnownK;
        else if (value == "residual_threshold")
            cfg.nomp.stop_mode = NompOptions::StopMode::kResidualThreshold;
        else
            throw ConfigError("config: unknown nomp.stop_mode '" + value + "'");
    } else if (key == "nomp.known_k")
        cfg.nomp.known_k = static_cast<int>(parse_int(key, value));
    else if (key == "nomp.tau_rel")
        cfg.nomp.tau_rel = parse_double(key, value);
    else if (key == "nomp.max_paths")
        cfg.nomp.max_paths = static_cast<int>(parse_int(key, value));
    else
        throw ConfigError("config: unknown key '" + key + "'");
}

} // namespace

TrialConfig parse_config_text(const std::string& text) {
    TrialConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos)
            line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            eq = line.find(':');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        apply_key(cfg, key, value);
    }
    return cfg;
}

TrialConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const TrialConfig& cfg) {
    std::ostringstream os;
    os << "n_elements = " << cfg.n_elements << '\n';
    os << "k_paths = " << cfg.k_paths << '\n';
    os << "m = " << cfg.m << '\n';
    os << "m_cs = " << cfg.m_cs << '\n';
    os << "min_separation = " << format_double(cfg.min_separation) << '\n';
    os << "amplitude_model = "
       << (cfg.amplitude_model == TrialConfig::AmplitudeModel::kUnitModulusRandomPhase
               ? "unit_modulus_random_phase"
               : "complex_gaussian")
       << '\n';
    os << "noise_std = " << format_double(cfg.noise_std) << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "wf.max_iters = " << cfg.wf.max_iters << '\n';
    os << "wf.step_scale_max = " << format_double(cfg.wf.step_scale_max) << '\n';
    os << "wf.step_warmup = " << format_double(cfg.wf.step_warmup) << '\n';
    os << "wf.grad_tol = " << format_double(cfg.wf.grad_tol) << '\n';
    os << "wf.init_power_iters = " << cfg.wf.init_power_iters << '\n';
    os << "nomp.grid_oversampling = " << cfg.nomp.grid_oversampling << '\n';
    os << "nomp.newton_steps_per_detection = " << cfg.nomp.newton_steps_per_detection
       << '\n';
    os << "nomp.cyclic_rounds = " << cfg.nomp.cyclic_rounds << '\n';
    os << "nomp.stop_mode = "
       << (cfg.nomp.stop_mode == NompOptions::StopMode::kKnownK ? "known_k"
                                                                : "residual_threshold")
       << '\n';
    os << "nomp.known_k = " << cfg.nomp.known_k << '\n';
    os << "nomp.tau_rel = " << format_double(cfg.nomp.tau_rel) << '\n';
    os << "nomp.max_paths = " << cfg.nomp.max_paths << '\n';
    return os.str();
}

} // namespace ncce
