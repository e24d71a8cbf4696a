#include "rqj/qfunction.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

namespace rqj {

double QGrid::cell_area() const {
    const double dre = re_axis.size() > 1 ? re_axis[1] - re_axis[0] : 1.0;
    const double dim = im_axis.size() > 1 ? im_axis[1] - im_axis[0] : 1.0;
    return dre * dim;
}

double QGrid::integral() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * cell_area();
}

std::vector<std::pair<double, double>> QGrid::local_maxima(double floor) const {
    const int nr = int(re_axis.size()), ni = int(im_axis.size());
    const double vmax = *std::max_element(values.begin(), values.end());
    std::vector<std::pair<double, std::pair<double, double>>> found;
    for (int i = 1; i + 1 < nr; ++i) {
        for (int j = 1; j + 1 < ni; ++j) {
            const double v = at(i, j);
            if (v < floor * vmax) continue;
            bool peak = true;
            for (int di = -1; di <= 1 && peak; ++di)
                for (int dj = -1; dj <= 1 && peak; ++dj)
                    if ((di || dj) && at(i + di, j + dj) >= v) peak = false;
            if (peak) found.push_back({v, {re_axis[i], im_axis[j]}});
        }
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::pair<double, double>> out;
    out.reserve(found.size());
    for (const auto& f : found) out.push_back(f.second);
    return out;
}

QGrid q_function(const Mat& rho, const SystemParams& params, const QGridSpec& spec) {
    if (spec.n_re < 2 || spec.n_im < 2)
        throw std::invalid_argument("q_function: grid needs at least 2x2 points");
    const Mat rho_f = partial_trace_atom(rho);
    const int nf = int(rho_f.rows());
    const double offset = params.frame_offset();

    QGrid grid;
    grid.re_axis.resize(spec.n_re);
    grid.im_axis.resize(spec.n_im);
    for (int i = 0; i < spec.n_re; ++i)
        grid.re_axis[i] = spec.re_min + (spec.re_max - spec.re_min) * i / (spec.n_re - 1);
    for (int j = 0; j < spec.n_im; ++j)
        grid.im_axis[j] = spec.im_min + (spec.im_max - spec.im_min) * j / (spec.n_im - 1);
    grid.values.assign(size_t(spec.n_re) * spec.n_im, 0.0);

    for (int i = 0; i < spec.n_re; ++i) {
        for (int j = 0; j < spec.n_im; ++j) {
            const Cplx alpha(grid.re_axis[i] - offset, grid.im_axis[j]);
            // Raw truncated amplitudes: exact <alpha|n> for n <= n_max.
            const Vec probe = coherent_state(alpha, nf - 1, false);
            const double q =
                std::real(probe.dot(rho_f * probe)) / std::numbers::pi;
            grid.values[size_t(i) * spec.n_im + j] = std::max(q, 0.0);
        }
    }

    double edge_max = 0.0;
    for (int i = 0; i < spec.n_re; ++i)
        edge_max = std::max({edge_max, grid.at(i, 0), grid.at(i, spec.n_im - 1)});
    for (int j = 0; j < spec.n_im; ++j)
        edge_max = std::max({edge_max, grid.at(0, j), grid.at(spec.n_re - 1, j)});
    if (edge_max > 1e-6) {
        grid.boundary_warning = true;
        std::cerr << "rqj warning: q_function boundary value " << edge_max
                  << " exceeds 1e-6; grid may be too small\n";
    }
    return grid;
}

}  // namespace rqj
