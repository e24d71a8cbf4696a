#include "rqj/operators.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace rqj {

Mat field_annihilation(int n_max) {
    if (n_max < 1) throw std::invalid_argument("field_annihilation: n_max must be >= 1");
    Mat a = Mat::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

Vec coherent_state(Cplx alpha, int n_max, bool renormalize, double* tail_out) {
    if (n_max < 1) throw std::invalid_argument("coherent_state: n_max must be >= 1");
    if (std::norm(alpha) > 600.0)
        throw std::invalid_argument("coherent_state: |alpha|^2 > 600 not supported");

    Vec c(n_max + 1);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= n_max; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));

    const double kept = c.squaredNorm();
    const double tail = 1.0 - kept;
    if (tail_out) *tail_out = tail;
    // Raw (un-renormalized) probes deliberately live in the truncated space,
    // so the adequacy warning only applies to state preparation.
    if (renormalize && tail > 1e-8)
        std::cerr << "rqj warning: coherent_state(|alpha|^2=" << std::norm(alpha)
                  << ", n_max=" << n_max << ") truncated tail probability " << tail << "\n";

    if (renormalize) c /= std::sqrt(kept);
    return c;
}

Eigen::Vector2cd dressed_plus() {
    const double s = 1.0 / std::sqrt(2.0);
    return {Cplx(s, 0.0), Cplx(0.0, -s)};
}

Eigen::Vector2cd dressed_minus() {
    const double s = 1.0 / std::sqrt(2.0);
    return {Cplx(s, 0.0), Cplx(0.0, s)};
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

JointOperators build_joint_operators(const SystemParams& params) {
    params.validate();
    const int nf = params.n_max + 1;
    const Cplx i(0.0, 1.0);

    JointOperators ops;
    ops.n_max = params.n_max;
    ops.dim = 2 * nf;
    ops.frame_offset = params.frame_offset();

    const Mat id_f = Mat::Identity(nf, nf);
    const Mat id_a = Mat::Identity(2, 2);
    Mat a_f = field_annihilation(params.n_max);
    if (ops.frame_offset != 0.0) a_f += ops.frame_offset * id_f;

    ops.a = kron(id_a, a_f);
    ops.a_dag = ops.a.adjoint();
    ops.x = ops.a + ops.a_dag;
    ops.y = -i * ops.a + i * ops.a_dag;

    Mat sigma_a = Mat::Zero(2, 2);
    sigma_a(0, 1) = 1.0;  // |g><e|
    ops.sigma = kron(sigma_a, id_f);
    ops.sigma_dag = ops.sigma.adjoint();
    Mat sz_a = Mat::Zero(2, 2);
    sz_a(0, 0) = -1.0;
    sz_a(1, 1) = 1.0;
    ops.sigma_z = kron(sz_a, id_f);

    const Eigen::Vector2cd plus = dressed_plus();
    const Eigen::Vector2cd minus = dressed_minus();
    const Mat mu_a = minus * plus.adjoint();
    ops.mu = kron(mu_a, id_f);
    ops.mu_dag = ops.mu.adjoint();
    ops.mu_z = kron(Mat(plus * plus.adjoint() - minus * minus.adjoint()), id_f);
    ops.proj_plus = kron(Mat(plus * plus.adjoint()), id_f);
    ops.proj_minus = kron(Mat(minus * minus.adjoint()), id_f);
    ops.identity = Mat::Identity(ops.dim, ops.dim);
    return ops;
}

Vec reference_state_vector(FixedPointBranch which, const SystemParams& params,
                           double* tail_out) {
    const FixedPointPair fp = compute_fixed_points(params);
    const Cplx alpha = (which == FixedPointBranch::Plus ? fp.alpha_plus_approx
                                                        : fp.alpha_minus_approx) -
                       params.frame_offset();
    const Vec field = coherent_state(alpha, params.n_max, true, tail_out);
    const Eigen::Vector2cd atom =
        (which == FixedPointBranch::Plus) ? dressed_plus() : dressed_minus();

    Vec psi(2 * field.size());
    psi.head(field.size()) = atom(0) * field;
    psi.tail(field.size()) = atom(1) * field;
    return psi;
}

Mat reference_state(FixedPointBranch which, const SystemParams& params, double* tail_out) {
    const Vec psi = reference_state_vector(which, params, tail_out);
    return psi * psi.adjoint();
}

}  // namespace rqj
