#include "rqj/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace rqj {

namespace {

struct File {
    std::FILE* f;
    explicit File(const std::string& path) : f(std::fopen(path.c_str(), "w")) {
        if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    }
    ~File() {
        if (f) std::fclose(f);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
};

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
    File out(path);
    std::fputs("t_us,i_hom_mhz,y_mean,p_plus,entropy_s,xi\n", out.f);
    for (size_t k = 0; k < rec.times.size(); ++k)
        std::fprintf(out.f, "%.8e,%.8e,%.8e,%.8e,%.8e,%.8e\n", rec.times[k],
                     rec.photocurrent[k], rec.y_mean[k], rec.p_plus[k], rec.entropy_s[k],
                     rec.xi[k]);
}

void write_qgrid_csv(const std::string& path, const QGrid& grid) {
    File out(path);
    std::fputs("re,im,q\n", out.f);
    for (size_t i = 0; i < grid.re_axis.size(); ++i)
        for (size_t j = 0; j < grid.im_axis.size(); ++j)
            std::fprintf(out.f, "%.8e,%.8e,%.8e\n", grid.re_axis[i], grid.im_axis[j],
                         grid.values[i * grid.im_axis.size() + j]);
}

void write_pfe_snapshot_csv(const std::string& path, const PfeState& state) {
    File out(path);
    std::fputs("y,p_plus,p_minus\n", out.f);
    for (size_t i = 0; i < state.y.size(); ++i)
        std::fprintf(out.f, "%.8e,%.8e,%.8e\n", state.y[i], state.p_plus[i], state.p_minus[i]);
}

void write_scaling_csv(const std::string& path, const std::vector<ScalingPoint>& points) {
    File out(path);
    std::fputs("g_mhz,kappa_mhz,gamma_perp_mhz,eta,inv_mean_inv_s,std_err\n", out.f);
    for (const auto& p : points)
        std::fprintf(out.f, "%.8e,%.8e,%.8e,%.8e,%.8e,%.8e\n", p.g, p.kappa, p.gamma_perp,
                     p.eta, p.inv_mean_inv_s, p.std_err);
}

}  // namespace rqj
