#pragma once

#include <utility>
#include <vector>

#include "rqj/density.hpp"

namespace rqj {

struct QGridSpec {
    double re_min = 0.0, re_max = 9.0;
    double im_min = -4.5, im_max = 4.5;
    int n_re = 101, n_im = 101;
};

struct QGrid {
    std::vector<double> re_axis, im_axis;
    std::vector<double> values;  // values[i_re * n_im + i_im], >= 0
    bool boundary_warning = false;

    double at(int i_re, int i_im) const { return values[size_t(i_re) * im_axis.size() + i_im]; }
    double cell_area() const;
    double integral() const;  // Riemann sum * cell area
    // Interior cells strictly greater than their 8 neighbours and above
    // floor * max; returned as (re, im) pairs sorted by descending value.
    std::vector<std::pair<double, double>> local_maxima(double floor = 1e-3) const;
};

// Husimi Q(alpha) = <alpha| Tr_atom[rho] |alpha> / pi on lab-frame grid
// coordinates. A displaced-frame rho is probed at alpha - alpha_bar so the
// output is always in lab amplitudes. Warns (flag + stderr) when boundary
// values exceed 1e-6.
QGrid q_function(const Mat& rho, const SystemParams& params, const QGridSpec& spec);

}  // namespace rqj
