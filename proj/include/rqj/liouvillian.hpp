#pragma once

#include <string>
#include <vector>

#include "rqj/density.hpp"
#include "rqj/operators.hpp"

namespace rqj {

// Generator of the deterministic master equation, either the full resonant
// model or its dressed-atom rotating-wave form. The action is kept in the
// factored form  L[rho] = G rho + rho G^dag + sum_k c_k A_k rho A_k^dag,
// with G collecting the commutator part and the anticommutator halves.
class Liouvillian {
  public:
    Liouvillian(const SystemParams& params, Variant variant);

    const SystemParams& params() const { return params_; }
    Variant variant() const { return variant_; }
    const JointOperators& ops() const { return ops_; }
    int dim() const { return ops_.dim; }

    // d rho / dt; input must be dim x dim.
    Mat apply(const Mat& rho) const;
    void apply_into(const Mat& rho, Mat& out, Mat& scratch) const;

    // Dense matricized superoperator acting on vec(rho), column-major.
    Mat superoperator_matrix() const;

    // Largest rate entering the drift, used for step-size checks.
    double fastest_rate() const;

  private:
    SystemParams params_;
    Variant variant_;
    JointOperators ops_;
    Mat drift_;  // G
    struct Channel {
        double rate;
        Mat op;        // A_k
        Mat op_dag;    // A_k^dag
    };
    std::vector<Channel> channels_;
};

// Step-size guard: dt must resolve the dissipative/coupling rates and keep
// at least ~10 samples per dressed-splitting period. Throws on violation.
void check_step_size(const Liouvillian& liou, double dt);

struct MeSeries {
    std::vector<double> times;
    std::vector<Mat> states;
    double max_trace_drift = 0.0;   // largest |tr(rho)-1| seen before renormalizing
    double total_renorm = 0.0;      // accumulated |tr(rho)-1|
};

// Fixed-step RK4 integration with per-step re-Hermitization and trace
// renormalization. States are recorded every `stride` steps (plus t=0 and
// the final time). Throws std::runtime_error if the trace drifts by more
// than 1e-6 in a single step (step size too large / instability).
MeSeries integrate_me(const Mat& rho0, const Liouvillian& liou, double dt, double t_final,
                      int stride = 1);

struct SteadyStateResult {
    Mat rho;
    double residual = 0.0;        // ||L rho||_F / ||L||_F
    int kernel_dim = 1;
    std::string method;           // "nullspace" or "integration"
};

// Stationary state of the Liouvillian. Uses a rank-revealing LU of the
// matricized generator with explicit trace normalization when the dimension
// permits, otherwise falls back to long-time integration. Throws on a
// degenerate (dim > 1) null space or non-convergence.
SteadyStateResult steady_state(const Liouvillian& liou, int max_nullspace_dim = 40);

}  // namespace rqj
