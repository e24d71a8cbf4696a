#include "rqj/liouvillian.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rqj {

Liouvillian::Liouvillian(const SystemParams& params, Variant variant)
    : params_(params), variant_(variant), ops_(build_joint_operators(params)) {
    const Cplx i(0.0, 1.0);
    const double g = params.g;
    const double kappa = params.kappa;
    const double gp = params.gamma_perp;

    Mat commutator_gen;  // anti-Hermitian K with L_H[rho] = K rho - rho K
    if (variant == Variant::Full) {
        commutator_gen = g * (ops_.a_dag * ops_.sigma - ops_.sigma_dag * ops_.a) -
                         i * params.drive * ops_.y;
        channels_.push_back({2.0 * kappa, ops_.a, ops_.a_dag});
        if (gp > 0.0) channels_.push_back({2.0 * gp, ops_.sigma, ops_.sigma_dag});
    } else {
        commutator_gen =
            -i * (params.drive * ops_.y + 0.5 * g * (ops_.mu_z * ops_.x));
        channels_.push_back({2.0 * kappa, ops_.a, ops_.a_dag});
        if (gp > 0.0) {
            channels_.push_back({0.5 * gp, ops_.mu, ops_.mu_dag});
            channels_.push_back({0.5 * gp, ops_.mu_z, ops_.mu_z});
            channels_.push_back({0.5 * gp, ops_.mu_dag, ops_.mu});
        }
    }

    drift_ = commutator_gen;
    for (const auto& ch : channels_) drift_ -= 0.5 * ch.rate * (ch.op_dag * ch.op);
}

void Liouvillian::apply_into(const Mat& rho, Mat& out, Mat& scratch) const {
    out.noalias() = drift_ * rho;
    out.noalias() += rho * drift_.adjoint();
    for (const auto& ch : channels_) {
        scratch.noalias() = ch.op * rho;
        out.noalias() += ch.rate * (scratch * ch.op_dag);
    }
}

Mat Liouvillian::apply(const Mat& rho) const {
    if (rho.rows() != ops_.dim || rho.cols() != ops_.dim)
        throw std::invalid_argument("Liouvillian::apply: dimension mismatch");
    Mat out(ops_.dim, ops_.dim), scratch(ops_.dim, ops_.dim);
    apply_into(rho, out, scratch);
    return out;
}

Mat Liouvillian::superoperator_matrix() const {
    const int d = ops_.dim;
    const Mat id = Mat::Identity(d, d);
    // vec(A X B) = (B^T kron A) vec(X), column-major vec.
    Mat sup = kron(id, drift_) + kron(drift_.conjugate(), id);
    for (const auto& ch : channels_)
        sup += ch.rate * kron(ch.op.conjugate(), ch.op);
    return sup;
}

double Liouvillian::fastest_rate() const {
    return std::max({2.0 * params_.kappa, params_.g, params_.gamma_perp});
}

void check_step_size(const Liouvillian& liou, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double rate = liou.fastest_rate();
    if (dt * rate > 0.1)
        throw std::invalid_argument("dt too large: dt*max(2kappa,g,gamma_perp) = " +
                                    std::to_string(dt * rate) + " > 0.1");
    const double omega = liou.params().rabi();
    if (omega > 0.0 && dt * omega > 2.0 * std::numbers::pi / 10.0)
        throw std::invalid_argument(
            "dt too large: fewer than 10 samples per dressed-splitting period");
}

MeSeries integrate_me(const Mat& rho0, const Liouvillian& liou, double dt, double t_final,
                      int stride) {
    if (rho0.rows() != liou.dim() || rho0.cols() != liou.dim())
        throw std::invalid_argument("integrate_me: dimension mismatch");
    check_step_size(liou, dt);
    if (stride < 1) stride = 1;

    const long n_steps = std::lround(t_final / dt);
    MeSeries out;
    out.times.reserve(n_steps / stride + 2);
    out.states.reserve(n_steps / stride + 2);

    Mat rho = hermitized(rho0);
    rho /= rho.trace().real();
    out.times.push_back(0.0);
    out.states.push_back(rho);

    const int d = liou.dim();
    Mat k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d), scratch(d, d);
    for (long step = 0; step < n_steps; ++step) {
        liou.apply_into(rho, k1, scratch);
        tmp = rho + (0.5 * dt) * k1;
        liou.apply_into(tmp, k2, scratch);
        tmp = rho + (0.5 * dt) * k2;
        liou.apply_into(tmp, k3, scratch);
        tmp = rho + dt * k3;
        liou.apply_into(tmp, k4, scratch);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double tr = rho.trace().real();
        const double drift = std::abs(tr - 1.0);
        out.max_trace_drift = std::max(out.max_trace_drift, drift);
        out.total_renorm += drift;
        if (drift > 1e-6)
            throw std::runtime_error("integrate_me: trace drift " + std::to_string(drift) +
                                     " in one step; reduce dt");
        rho = hermitized(rho);
        rho /= tr;

        if ((step + 1) % stride == 0 || step + 1 == n_steps) {
            out.times.push_back((step + 1) * dt);
            out.states.push_back(rho);
        }
    }
    return out;
}

SteadyStateResult steady_state(const Liouvillian& liou, int max_nullspace_dim) {
    const int d = liou.dim();
    SteadyStateResult result;

    if (d <= max_nullspace_dim) {
        const Mat sup = liou.superoperator_matrix();
        Eigen::FullPivLU<Mat> lu(sup);
        lu.setThreshold(1e-9);
        const int kdim = d * d - int(lu.rank());
        result.kernel_dim = kdim;
        if (kdim > 1)
            throw std::runtime_error("steady_state: degenerate null space (dim " +
                                     std::to_string(kdim) + ")");
        if (kdim == 1) {
            const Mat kernel = lu.kernel();
            Mat rho = Eigen::Map<const Mat>(kernel.col(0).data(), d, d);
            const Cplx tr = rho.trace();
            if (std::abs(tr) < 1e-12)
                throw std::runtime_error("steady_state: null vector has zero trace");
            rho /= tr;
            rho = hermitized(rho);
            rho /= rho.trace().real();
            result.rho = rho;
            result.residual = (sup * Eigen::Map<const Mat>(rho.data(), d * d, 1)).norm() /
                              (sup.norm() * rho.norm());
            result.method = "nullspace";
            if (result.residual < 1e-8) return result;
            // Poorly conditioned kernel; fall through to integration.
        }
    }

    // Long-time integration fallback. The slowest relevant rate is
    // gamma_perp (or kappa when the atom sector is frozen).
    const auto& p = liou.params();
    const double slow = (p.gamma_perp > 0.0) ? p.gamma_perp : p.kappa;
    const double dt = std::min(0.05 / liou.fastest_rate(),
                               0.5 * std::numbers::pi / std::max(p.rabi(), 1.0));
    Mat rho = Mat::Zero(d, d);
    rho(0, 0) = 1.0;
    const Mat sup = (d <= max_nullspace_dim) ? liou.superoperator_matrix() : Mat();
    const double sup_norm = sup.size() ? sup.norm() : liou.fastest_rate() * d;

    double t_chunk = 2.0 / slow;
    for (int iter = 0; iter < 64; ++iter) {
        MeSeries chunk = integrate_me(rho, liou, dt, t_chunk, 1 << 30);
        rho = chunk.states.back();
        const double res = liou.apply(rho).norm() / (sup_norm * rho.norm());
        if (res < 1e-8) {
            result.rho = rho;
            result.residual = res;
            result.kernel_dim = 1;
            result.method = "integration";
            return result;
        }
    }
    throw std::runtime_error("steady_state: long-time integration did not converge");
}

}  // namespace rqj
