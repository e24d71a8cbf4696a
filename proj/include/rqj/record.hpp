#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rqj {

enum class SwitchDirection { Up, Down };

struct SwitchEvent {
    double t = 0.0;                 // us
    SwitchDirection direction = SwitchDirection::Up;
    double filtered_level_before = 0.0;  // MHz
    double filtered_level_after = 0.0;   // MHz
};

// Uniformly sampled conditional time series shared by the stochastic
// master-equation and reduced P-function simulators. All arrays have equal
// length; samples are every `sample_dt` = stride * step_dt.
struct TrajectoryRecord {
    double step_dt = 0.0;    // integrator step (us)
    double sample_dt = 0.0;  // spacing of the stored samples (us)

    std::vector<double> times;         // us
    std::vector<double> photocurrent;  // MHz, 2*kappa*eta*<y> + sqrt(2*kappa*eta)*xi
    std::vector<double> y_mean;        // conditional <y>
    std::vector<double> p_plus;        // dressed upper-state population
    std::vector<double> entropy_s;     // S = p_plus - p_plus^2
    std::vector<double> xi;            // noise sample dW/dt of the recorded step

    // Reduced-model extras (empty for SME runs).
    std::vector<double> delta_y;       // <y>_+ - <y>_-

    // Optional channels filtered at full step resolution during the run and
    // sampled at the record stride; filter_fc = 0 means absent.
    double filter_fc = 0.0;            // MHz
    std::vector<double> photocurrent_filtered;
    std::vector<double> xi_filtered;

    std::vector<SwitchEvent> switch_events;  // filled by the analysis layer

    size_t burn_in_samples = 0;  // samples to drop for stationary statistics
    bool ok = true;
    std::string error;

    size_t size() const { return times.size(); }
    double duration() const { return times.empty() ? 0.0 : times.back(); }
};

}  // namespace rqj
