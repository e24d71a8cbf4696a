#pragma once

#include "rqj/noise.hpp"
#include "rqj/params.hpp"
#include "rqj/record.hpp"

namespace rqj {

// Pair of phase-quadrature distributions P_+(y), P_-(y) on a uniform
// cell-centered grid. Densities are non-negative; the joint normalization
// sum (P_+ + P_-) dy = 1 is restored after every step.
struct PfeState {
    std::vector<double> y;  // cell centers
    double dy = 0.0;
    std::vector<double> p_plus, p_minus;  // densities
    double clipped_mass = 0.0;            // accumulated negative mass removed

    double total() const;
    void renormalize();  // clips negatives (logging them), then rescales
};

struct PfeMoments {
    double p_plus = 0.0, p_minus = 0.0;
    double y_mean_plus = 0.0, y_mean_minus = 0.0;
    double y_mean = 0.0;
    double delta_y = 0.0;  // <y>_+ - <y>_- ; 0 when either branch is empty
    double entropy_s = 0.0;
};

// Uniform grid spanning [-span, span] in y (default span 4g/kappa set by
// the caller), n_y cells.
PfeState make_pfe_grid(double y_min, double y_max, int n_y);

// All mass in one branch, concentrated in the cell nearest y0.
void pfe_set_point_mass(PfeState& state, bool plus_branch, double y0);

PfeMoments pfe_moments(const PfeState& state);

struct PfeStepStats {
    double pre_clip_total_error = 0.0;  // |sum - previous sum| before clipping
    double clipped_mass = 0.0;          // negative mass removed this step
};

// One Euler-Maruyama step of the coupled advection / measurement / exchange
// dynamics, donor-cell upwinding for the advection term. Throws on CFL
// violation or non-finite input.
PfeStepStats pfe_step(PfeState& state, const SystemParams& params, double dt, double dW);

struct PfeOptions {
    double dt = 2e-5;      // us
    double t_final = 40.0; // us
    int stride = 10;
    double burn_in = 1.0;  // us
    double y_span_factor = 4.0;  // grid spans +- factor * g/kappa
    int n_y = 512;
    double record_filter_fc = 0.0;  // as in SmeOptions
    // Snapshot times (us); matching grid snapshots are returned.
    std::vector<double> snapshot_times;
};

struct PfeRun {
    TrajectoryRecord record;
    std::vector<std::pair<double, PfeState>> snapshots;
    double clipped_mass_rate = 0.0;  // clipped mass per us
};

// Simulates the reduced model starting on the + attractor; the record
// carries the same channels as the SME simulator plus delta_y.
PfeRun simulate_pfe(const SystemParams& params, const PfeOptions& opt, NoiseSource noise);

// Consistency of the recorded p_plus against the closed moment equation
// dp_+/dt = sqrt(2 kappa eta) xi (p_+ - p_+^2) Delta_y - gamma_perp (p_+ - 1/2).
// Requires a full-resolution record (stride 1) with xi and delta_y stored.
struct PplusOdeCheck {
    double rms_residual_normalized = 0.0;
    double sign_test_fraction = 1.0;  // fraction of (xi>0, Delta_y<0) steps
                                      // with dp_+ <= gamma_perp dt / 2
    size_t n_steps = 0;
    bool resolution_ok = true;
};
PplusOdeCheck check_p_plus_ode(const TrajectoryRecord& rec, const SystemParams& params);

}  // namespace rqj
