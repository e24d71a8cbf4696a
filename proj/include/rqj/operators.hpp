#pragma once

#include <Eigen/Dense>
#include <complex>

#include "rqj/params.hpp"

namespace rqj {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Fock-ladder annihilation operator on an (n_max+1)-dimensional space:
// sqrt(n) on the superdiagonal. Throws std::invalid_argument for n_max < 1.
Mat field_annihilation(int n_max);

// Truncated coherent-state vector. When renormalize is true (the default)
// the vector is renormalized after truncation; otherwise the raw Poisson
// amplitudes are kept (used for Q-function probes, where the exact overlap
// with the truncated space is wanted). tail_out, if non-null, receives the
// truncated tail probability 1 - sum |c_n|^2; a warning is printed when it
// exceeds 1e-8.
Vec coherent_state(Cplx alpha, int n_max, bool renormalize = true, double* tail_out = nullptr);

// Atomic basis convention: index 0 = |g>, index 1 = |e>; sigma = |g><e|.
// Dressed states |+-> = (|g> -+ i|e>)/sqrt(2); mu = |-><+|.
Eigen::Vector2cd dressed_plus();
Eigen::Vector2cd dressed_minus();

// All model operators on the joint atom (x) field space, dim = 2(n_max+1).
// In the displaced frame the drift ladder operators carry the coherent
// offset alpha_bar * I, so every drift/measurement term can be written in
// the bare lab form with `a` taken from here.
struct JointOperators {
    int n_max = 0;
    int dim = 0;
    double frame_offset = 0.0;  // alpha_bar in the displaced frame, else 0

    Mat a, a_dag;          // annihilation including the frame offset
    Mat x, y;              // quadratures a + a^dag, -i a + i a^dag
    Mat sigma, sigma_dag;  // atomic lowering |g><e| and raising
    Mat sigma_z;           // [sigma^dag, sigma]
    Mat mu, mu_dag;        // dressed lowering |-><+| and raising
    Mat mu_z;              // [mu^dag, mu] = |+><+| - |-><-|
    Mat proj_plus, proj_minus;  // dressed projectors on the joint space
    Mat identity;
};

JointOperators build_joint_operators(const SystemParams& params);

// Pure joint reference state |alpha_fix>|+-> at the strong-driving fixed
// point (displaced frame keeps only the -+ i g/(2 kappa) offset).
enum class FixedPointBranch { Plus, Minus };
Vec reference_state_vector(FixedPointBranch which, const SystemParams& params,
                           double* tail_out = nullptr);
Mat reference_state(FixedPointBranch which, const SystemParams& params,
                    double* tail_out = nullptr);

Mat kron(const Mat& a, const Mat& b);

}  // namespace rqj
