#pragma once

#include <complex>

namespace rqj {

// Which representation the Fock ladder covers: the full coherent amplitude
// (Lab) or fluctuations about alpha_bar = E/kappa (Displaced). The displaced
// frame needs far fewer Fock states at strong driving.
enum class Frame { Lab, Displaced };

// Master-equation variant: the full resonant model or its dressed-atom
// rotating-wave form with the three Mollow decay channels.
enum class Variant { Full, Rwa };

// Physical rates in MHz (1 MHz = 1/us), times in us throughout.
struct SystemParams {
    double g = 120.0;          // atom-cavity coupling
    double kappa = 40.0;       // field decay rate
    double gamma_perp = 2.6;   // transverse atomic decay rate
    double drive = 178.885438199983180;  // E, coherent driving amplitude ((E/kappa)^2 = 20)
    double eta = 1.0;          // homodyne efficiency, in [0,1]
    int n_max = 15;            // Fock truncation
    Frame frame = Frame::Displaced;

    double alpha_bar() const { return drive / kappa; }
    // Dressed-state splitting Omega = 2 g alpha_bar.
    double rabi() const { return 2.0 * g * alpha_bar(); }
    // Displacement folded into the drift operators (0 in the lab frame).
    double frame_offset() const { return frame == Frame::Displaced ? alpha_bar() : 0.0; }
    int joint_dim() const { return 2 * (n_max + 1); }

    // Throws std::invalid_argument on out-of-range values. g = 0 and E = 0
    // are admitted as decoupled/undriven limits; operations that need the
    // bistable operating point check 2E > g separately.
    void validate() const;
};

struct FixedPointPair {
    std::complex<double> alpha_plus, alpha_minus;  // exact semiclassical amplitudes
    std::complex<double> s_plus, s_minus;          // atomic polarizations
    double w = 0.0;                                // inversion (0 at the fixed points)
    // Strong-driving approximants alpha_bar -/+ i g/(2 kappa) and the
    // corresponding phase-quadrature means -/+ g/kappa.
    std::complex<double> alpha_plus_approx, alpha_minus_approx;
    double y_plus, y_minus;
};

// Semiclassical fixed points of the driven model (gamma_perp = 0 manifold).
// Requires 2E > g; throws std::domain_error otherwise.
FixedPointPair compute_fixed_points(const SystemParams& params);

// Residuals of the factorized classical equations of motion at a candidate
// fixed point (d alpha/dt, d s/dt, d w/dt with gamma_perp = 0), in MHz.
struct ClassicalResiduals {
    std::complex<double> d_alpha;
    std::complex<double> d_s;
    double d_w;
    double max_abs() const;
};
ClassicalResiduals classical_fixed_point_residuals(const SystemParams& params,
                                                   std::complex<double> alpha,
                                                   std::complex<double> s, double w);

}  // namespace rqj
