// Cross-model property: the reduced P-function dynamics reproduces the
// photocurrent statistics of the conditional master equation. Slow test,
// kept out of the per-module unit binaries.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rqj/analysis.hpp"
#include "rqj/pfe.hpp"
#include "rqj/sme.hpp"
#include "test_util.hpp"

using namespace rqj;
using rqj::testing::paper_params;

namespace {

// Boxcar-rebin a full-rate photocurrent to a common sample spacing so the
// shot-noise floors of records with different step sizes line up.
std::vector<double> rebin(const std::vector<double>& x, double dt, double dt_out) {
    const size_t factor = size_t(std::lround(dt_out / dt));
    std::vector<double> out;
    out.reserve(x.size() / factor);
    for (size_t k = 0; k + factor <= x.size(); k += factor) {
        double s = 0.0;
        for (size_t j = 0; j < factor; ++j) s += x[k + j];
        out.push_back(s / double(factor));
    }
    return out;
}

}  // namespace

TEST_CASE("reduced model and conditional SME share their photocurrent spectrum") {
    const SystemParams p = paper_params();
    const double t_final = 80.0;
    const double dt_common = 2e-3;  // Nyquist 250 MHz, band of interest below 50

    PfeOptions pfe_opt;
    pfe_opt.dt = 2e-5;
    pfe_opt.t_final = t_final;
    pfe_opt.stride = 1;
    pfe_opt.burn_in = 1.0;
    const PfeRun pfe = simulate_pfe(p, pfe_opt, NoiseSource(31337, 0));
    REQUIRE(pfe.record.ok);

    const Liouvillian liou(p, Variant::Rwa);
    SmeOptions sme_opt;
    sme_opt.dt = 1e-4;
    sme_opt.t_final = t_final;
    sme_opt.stride = 1;
    sme_opt.burn_in = 1.0;
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);
    const TrajectoryRecord sme =
        simulate_trajectory(rho0, liou, sme_opt, NoiseSource(31337, 1));
    REQUIRE(sme.ok);

    const size_t skip_pfe = pfe.record.burn_in_samples;
    const size_t skip_sme = sme.burn_in_samples;
    const std::vector<double> i_pfe = rebin(
        {pfe.record.photocurrent.begin() + skip_pfe, pfe.record.photocurrent.end()},
        pfe_opt.dt, dt_common);
    const std::vector<double> i_sme = rebin(
        {sme.photocurrent.begin() + skip_sme, sme.photocurrent.end()}, sme_opt.dt, dt_common);

    const double psd_pfe = band_averaged_psd(i_pfe, dt_common, 0.1, 50.0, 2048);
    const double psd_sme = band_averaged_psd(i_sme, dt_common, 0.1, 50.0, 2048);
    const double ratio = psd_pfe / psd_sme;
    INFO("band-averaged PSD ratio (reduced/SME) = " << ratio);
    CHECK(ratio > 0.8);
    CHECK(ratio < 1.25);

    // Both must also place the slow telegraph power well above the shot
    // floor; otherwise the band average compares only detector noise.
    const double floor_pfe = band_averaged_psd(i_pfe, dt_common, 100.0, 200.0, 2048);
    const double low_pfe = band_averaged_psd(i_pfe, dt_common, 0.1, 2.0, 2048);
    CHECK(low_pfe > 10.0 * floor_pfe);
}
