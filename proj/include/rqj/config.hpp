#pragma once

#include <map>
#include <string>
#include <vector>

#include "rqj/analysis.hpp"
#include "rqj/params.hpp"
#include "rqj/qfunction.hpp"

namespace rqj {

enum class RunMode { MeSteady, SmeTraj, PfeTraj, Ensemble, Scaling, Qfunc };

std::string to_string(RunMode mode);

// Fully resolved experiment configuration. Every knob has an explicit value
// after resolve(); echo() lists them all so run metadata never contains a
// silent default.
struct RunConfig {
    RunMode mode = RunMode::SmeTraj;
    SystemParams params;
    Variant variant = Variant::Rwa;

    double dt = 0.0;        // us; 0 = mode/frame default
    double t_final = -1.0;  // us; < 0 = mode default
    int n_traj = 0;         // 0 = mode default
    uint64_t base_seed = 1;
    std::string output_dir = "out";
    int stride = 10;
    int workers = 0;        // 0 = RQJ_WORKERS env, else hardware
    int keep_records = 1;

    double filter_fc = 10.0;               // MHz
    double threshold_low = 0.0, threshold_high = 0.0;  // both 0 = -+g
    double burn_in = -1.0;                 // < 0 = max(1, 5/kappa)

    int pfe_n_y = 512;
    double pfe_y_span_factor = 4.0;
    std::vector<double> snapshot_times;

    QGridSpec qgrid;

    ScalingSpec scaling;

    // Applies mode/frame-dependent defaults (dt, n_max, t_final, variant,
    // thresholds, burn-in, workers).
    void resolve();
    // Fail-fast validation of every downstream numeric constraint; throws
    // std::invalid_argument with the violated constraint.
    void validate() const;
    // All resolved values, for metadata.
    std::map<std::string, std::string> echo() const;
};

// Builds a RunConfig from flat key=value pairs. Unknown keys are errors.
RunConfig config_from_pairs(const std::map<std::string, std::string>& kv);

// Parses a flat `key = value` file ('#' starts a comment). Later duplicate
// keys override earlier ones.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace rqj
