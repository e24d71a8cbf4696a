#pragma once

#include "rqj/operators.hpp"

namespace rqj {

inline Mat hermitized(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline Cplx expectation(const Mat& rho, const Mat& op) {
    if (rho.rows() != op.rows() || rho.cols() != op.cols())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (rho * op).trace();
}

inline Mat projector(const Vec& state) { return state * state.adjoint(); }

double purity(const Mat& rho);
double min_eigenvalue(const Mat& rho);

// 0.5 * trace norm of (a - b); both must be Hermitian.
double trace_distance(const Mat& a, const Mat& b);

// Reduced field state, tracing out the two-level atom (atom index slow).
Mat partial_trace_atom(const Mat& rho);

// Reduced atomic state (2x2), tracing out the field.
Mat partial_trace_field(const Mat& rho);

}  // namespace rqj
