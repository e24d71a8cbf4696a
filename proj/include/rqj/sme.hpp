#pragma once

#include <optional>

#include "rqj/liouvillian.hpp"
#include "rqj/noise.hpp"
#include "rqj/record.hpp"

namespace rqj {

struct SmeOptions {
    double dt = 1e-4;       // us
    double t_final = 1.0;   // us
    int stride = 10;        // record every stride-th step
    double burn_in = 0.0;   // us, marked on the record for later statistics
    // When > 0, photocurrent and xi are low-pass filtered at full step
    // resolution during the run and the filtered values recorded.
    double record_filter_fc = 0.0;  // MHz
};

// One Euler-Maruyama step of the conditional master equation: deterministic
// drift plus the homodyne back-action sqrt(2 kappa eta) dW
// (-i(a rho - rho a^dag) - <y> rho), then re-Hermitization and trace
// renormalization. Throws on non-finite entries.
Mat sme_step(const Mat& rho, const Liouvillian& liou, double dt, double dW);

// Conditional trajectory. Checkpoint states (for ensemble averaging) are
// captured at the requested times when `checkpoint_states` is non-null.
TrajectoryRecord simulate_trajectory(const Mat& rho0, const Liouvillian& liou,
                                     const SmeOptions& opt, NoiseSource noise,
                                     const std::vector<double>* checkpoint_times = nullptr,
                                     std::vector<Mat>* checkpoint_states = nullptr);

struct EnsembleOptions {
    int n_traj = 500;
    uint64_t base_seed = 1;
    SmeOptions sme;
    std::vector<double> checkpoint_times;  // defaults to {t_final}
    int workers = 1;
    int keep_records = 1;  // per-trajectory records retained (by index)
};

struct EnsembleResult {
    std::vector<double> checkpoint_times;
    std::vector<Mat> mean_states;  // order-deterministic pairwise reduction
    std::vector<TrajectoryRecord> records;
    int n_traj = 0;
    int n_success = 0;
};

// Independent trajectories with per-trajectory noise streams
// (base_seed, 0..n_traj-1). The mean is reduced over a fixed pairwise tree,
// so the result is bit-identical for any worker count.
EnsembleResult ensemble_run(const Mat& rho0, const Liouvillian& liou,
                            const EnsembleOptions& opt);

}  // namespace rqj
