#include "rqj/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rqj {

void SystemParams::validate() const {
    std::ostringstream err;
    if (!(g >= 0.0)) err << "g must be >= 0 (got " << g << "); ";
    if (!(kappa > 0.0)) err << "kappa must be > 0 (got " << kappa << "); ";
    if (!(gamma_perp >= 0.0)) err << "gamma_perp must be >= 0 (got " << gamma_perp << "); ";
    if (!(drive >= 0.0)) err << "drive must be >= 0 (got " << drive << "); ";
    if (!(eta >= 0.0 && eta <= 1.0)) err << "eta must lie in [0,1] (got " << eta << "); ";
    if (n_max < 1) err << "n_max must be >= 1 (got " << n_max << "); ";
    const std::string msg = err.str();
    if (!msg.empty()) throw std::invalid_argument("SystemParams: " + msg);
}

FixedPointPair compute_fixed_points(const SystemParams& params) {
    params.validate();
    if (!(2.0 * params.drive > params.g))
        throw std::domain_error(
            "compute_fixed_points: requires 2E > g (driving too weak for the "
            "bistable operating point)");

    const std::complex<double> i(0.0, 1.0);
    const double r = params.g / (4.0 * params.drive);  // in (0, 1/2)
    const double root = std::sqrt(0.25 - r * r);

    FixedPointPair fp;
    fp.s_plus = -r - i * root;
    fp.s_minus = -r + i * root;
    fp.alpha_plus = (params.drive + params.g * fp.s_plus) / params.kappa;
    fp.alpha_minus = (params.drive + params.g * fp.s_minus) / params.kappa;
    fp.w = 0.0;

    const double gk2 = params.g / (2.0 * params.kappa);
    fp.alpha_plus_approx = params.alpha_bar() - i * gk2;
    fp.alpha_minus_approx = params.alpha_bar() + i * gk2;
    fp.y_plus = -params.g / params.kappa;
    fp.y_minus = params.g / params.kappa;
    return fp;
}

double ClassicalResiduals::max_abs() const {
    return std::max({std::abs(d_alpha), std::abs(d_s), std::abs(d_w)});
}

ClassicalResiduals classical_fixed_point_residuals(const SystemParams& params,
                                                   std::complex<double> alpha,
                                                   std::complex<double> s, double w) {
    ClassicalResiduals r;
    r.d_alpha = params.drive + params.g * s - params.kappa * alpha;
    r.d_s = params.g * w * alpha;  // gamma_perp = 0 manifold
    r.d_w = -4.0 * params.g * std::real(std::conj(alpha) * s);
    return r;
}

}  // namespace rqj
