#include "rqj/density.hpp"

#include <Eigen/Eigenvalues>

namespace rqj {

double purity(const Mat& rho) { return std::real((rho * rho).trace()); }

double min_eigenvalue(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(rho), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double trace_distance(const Mat& a, const Mat& b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Mat partial_trace_atom(const Mat& rho) {
    const Eigen::Index nf = rho.rows() / 2;
    Mat out = rho.topLeftCorner(nf, nf) + rho.bottomRightCorner(nf, nf);
    return out;
}

Mat partial_trace_field(const Mat& rho) {
    const Eigen::Index nf = rho.rows() / 2;
    Mat out(2, 2);
    out(0, 0) = rho.topLeftCorner(nf, nf).trace();
    out(0, 1) = rho.topRightCorner(nf, nf).trace();
    out(1, 0) = rho.bottomLeftCorner(nf, nf).trace();
    out(1, 1) = rho.bottomRightCorner(nf, nf).trace();
    return out;
}

}  // namespace rqj
