#pragma once

#include <string>
#include <vector>

#include "rqj/analysis.hpp"
#include "rqj/pfe.hpp"
#include "rqj/qfunction.hpp"
#include "rqj/record.hpp"

namespace rqj {

// All CSV floats are written as %.8e (9 significant digits).

// Header: t_us,i_hom_mhz,y_mean,p_plus,entropy_s,xi
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);

// Header: re,im,q
void write_qgrid_csv(const std::string& path, const QGrid& grid);

// Header: y,p_plus,p_minus
void write_pfe_snapshot_csv(const std::string& path, const PfeState& state);

// Header: g_mhz,kappa_mhz,gamma_perp_mhz,eta,inv_mean_inv_s,std_err
void write_scaling_csv(const std::string& path, const std::vector<ScalingPoint>& points);

}  // namespace rqj
