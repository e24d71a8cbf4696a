#pragma once

#include <vector>

#include "rqj/noise.hpp"
#include "rqj/params.hpp"
#include "rqj/record.hpp"

namespace rqj {

// Single-pole recursive low-pass, zero-initialized, -3 dB at f_c (MHz).
// Rejects f_c at or above the Nyquist frequency of the series.
std::vector<double> lowpass(const std::vector<double>& x, double dt, double f_c);

// Schmitt trigger on the low-passed photocurrent: an Up event on crossing
// thr_high having last been below thr_low, and symmetrically for Down.
// Uses the record's full-rate filtered photocurrent when it was produced
// with the same cutoff, otherwise filters the stored samples.
std::vector<SwitchEvent> detect_switches(const TrajectoryRecord& rec,
                                         const SystemParams& params, double f_c,
                                         double thr_low, double thr_high);

inline std::vector<SwitchEvent> detect_switches(const TrajectoryRecord& rec,
                                                const SystemParams& params,
                                                double f_c = 10.0) {
    return detect_switches(rec, params, f_c, -params.g, params.g);
}

double switch_rate(const std::vector<SwitchEvent>& events, const TrajectoryRecord& rec);

// Deterministic crossing latency: time for the filtered photocurrent to
// reach `threshold` after an instantaneous attractor switch, with the field
// relaxing at kappa through the one-pole filter. Used by the dead-pair
// correction below.
double detector_latency(const SystemParams& params, double f_c, double threshold);

// Dwells shorter than the latency hide their two bounding transitions, so
// raw Schmitt counts under-estimate the switching rate. For Poisson flips
// the efficiency is (1-q)/(1+q) with q = 1 - exp(-r d); `corrected` solves
// the resulting fixed point for r.
struct SwitchRateEstimate {
    size_t n_events = 0;
    double raw = 0.0;        // events per us
    double corrected = 0.0;  // dead-pair corrected rate
    double latency = 0.0;    // us
};
SwitchRateEstimate estimate_switch_rate(const TrajectoryRecord& rec, const SystemParams& params,
                                        double f_c, double thr_low, double thr_high);

// Piecewise-deterministic reference process: dressed label flipping as a
// Poisson process at rate gamma_perp/2, field amplitude relaxing to the
// fixed point of the current label at rate kappa. Produces a synthetic
// homodyne record for detector calibration and dwell statistics.
struct OracleOptions {
    double dt = 1e-3;       // us
    double t_final = 800.0; // us
    double record_filter_fc = 0.0;
};
struct OracleRun {
    std::vector<double> flip_times;   // us
    std::vector<double> dwell_times;  // completed dwells (us)
    double label_plus_fraction = 0.0;
    TrajectoryRecord record;
};
OracleRun semiclassical_jump_oracle(const SystemParams& params, const OracleOptions& opt,
                                    NoiseSource noise);

// One-sample Kolmogorov-Smirnov p-value against an exponential with the
// given mean.
double ks_test_exponential(std::vector<double> samples, double mean);

// Harmonic-type estimator 1/mean(1/S) over post-burn-in samples, with a
// block bootstrap standard error. S is floored at s_floor before inversion.
// `defined` is false for degenerate runs where S never leaves the floor.
struct EntropyStatistic {
    double inv_mean_inv_s = 0.0;
    double std_err = 0.0;
    bool defined = false;
    size_t n_samples = 0;
};
EntropyStatistic entropy_statistic(const std::vector<const TrajectoryRecord*>& records,
                                   double block_us = 5.0, int n_bootstrap = 200,
                                   uint64_t bootstrap_seed = 9001,
                                   double s_floor = 1e-12);

// Long-run balance gamma_perp E[1/(2S)] vs kappa eta E[Delta_y^2] from
// reduced-model records; ok is false with fewer than 10^4 usable samples
// or a degenerate (gamma_perp = 0) run.
struct StationarityCheck {
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
    size_t n_samples = 0;
    bool ok = false;
};
StationarityCheck stationarity_check(const std::vector<const TrajectoryRecord*>& records,
                                     const SystemParams& params, double s_floor = 1e-12);

// Mean of the low-passed noise over `window` us preceding each event of the
// given direction; std_err is over events. Prefers the record's full-rate
// filtered channel, otherwise filters the stored samples at fallback_fc.
struct NoiseBias {
    double mean = 0.0;
    double std_err = 0.0;
    size_t n_events = 0;
};
NoiseBias pre_switch_noise_bias(const TrajectoryRecord& rec,
                                const std::vector<SwitchEvent>& events, SwitchDirection dir,
                                double window, double fallback_fc = 10.0);

// Ordinary least squares y = slope * x + intercept.
struct LineFit {
    double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Welch-averaged one-sided periodogram (Hann window, half-overlapping
// segments), averaged over the band [f_lo, f_hi] in MHz.
double band_averaged_psd(const std::vector<double>& x, double dt, double f_lo, double f_hi,
                         int segment_length = 1024);

struct ScalingPoint {
    double g = 0.0, kappa = 0.0, gamma_perp = 0.0, eta = 1.0;
    double inv_mean_inv_s = 0.0;
    double std_err = 0.0;
    bool in_regime = true;
};

struct ScalingFit {
    double slope = 0.0, intercept = 0.0, slope_ci95 = 0.0;
    int n_points = 0;
};

struct ScalingSpec {
    std::vector<double> g_values = {60.0, 84.85, 120.0, 169.7, 240.0};
    double g_over_kappa = 3.0;
    std::vector<double> gamma_perp_values = {1.3, 0.65};
    double eta_for_g_sweep = 1.0;
    std::vector<double> eta_values = {0.2, 0.35, 0.6, 1.0};
    double g_for_eta_sweep = 120.0;
    double kappa_for_eta_sweep = 40.0;
    double gamma_for_eta_sweep = 1.3;
    int n_traj = 4;
    double t_final = 60.0;  // us per trajectory
    double burn_in = 2.0;
    int n_y = 512;
    uint64_t base_seed = 777;
};

struct ScalingStudy {
    // g sweep, one block per gamma_perp value (same g grid).
    std::vector<std::vector<ScalingPoint>> g_sweeps;
    std::vector<ScalingFit> g_fits;               // log(1/E[1/S]) vs log g
    std::vector<double> gamma_pair_ratios;        // series[0] / series[1], pointwise
    std::vector<ScalingPoint> eta_sweep;
    ScalingFit eta_fit;                           // log(1/E[1/S]) vs log eta
};

ScalingStudy scaling_study(const ScalingSpec& spec, int workers);

}  // namespace rqj
