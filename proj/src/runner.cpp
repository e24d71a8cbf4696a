#include "rqj/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rqj/csv.hpp"
#include "rqj/liouvillian.hpp"
#include "rqj/pfe.hpp"
#include "rqj/sme.hpp"
#include "rqj/version.hpp"

namespace rqj {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json params_json(const SystemParams& p) {
    return json{{"g_mhz", p.g},
                {"kappa_mhz", p.kappa},
                {"gamma_perp_mhz", p.gamma_perp},
                {"e_mhz", p.drive},
                {"eta", p.eta},
                {"n_max", p.n_max},
                {"frame", p.frame == Frame::Displaced ? "displaced" : "lab"}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void write_meta(const fs::path& dir, const RunConfig& cfg, bool incomplete, double wall_s,
                const std::string& error = "") {
    json meta;
    meta["version"] = kVersion;
    meta["mode"] = to_string(cfg.mode);
    meta["base_seed"] = cfg.base_seed;
    meta["incomplete"] = incomplete;
    meta["wall_time_s"] = wall_s;
    if (!error.empty()) meta["error"] = error;
    json c;
    for (const auto& [k, v] : cfg.echo()) c[k] = v;
    meta["config"] = c;
    write_json(dir / "run_meta.json", meta);
}

json scaling_fit_json(const ScalingFit& fit) {
    return json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"slope_ci95", fit.slope_ci95},
                {"n_points", fit.n_points}};
}

void run_me_steady(const RunConfig& cfg, const fs::path& dir, json& summary) {
    Liouvillian liou(cfg.params, cfg.variant);
    const SteadyStateResult ss = steady_state(liou);
    summary["residual"] = ss.residual;
    summary["method"] = ss.method;
    summary["y_mean"] = std::real(expectation(ss.rho, liou.ops().y));
    summary["p_plus"] = std::real(expectation(ss.rho, liou.ops().proj_plus));
    summary["purity"] = purity(ss.rho);
    summary["min_eigenvalue"] = min_eigenvalue(ss.rho);
    write_json(dir / "steady_state.json", summary);
}

void run_qfunc(const RunConfig& cfg, const fs::path& dir, json& summary) {
    Liouvillian liou(cfg.params, cfg.variant);
    const SteadyStateResult ss = steady_state(liou);
    const QGrid grid = q_function(ss.rho, cfg.params, cfg.qgrid);
    write_qgrid_csv((dir / "qgrid.csv").string(), grid);
    summary["residual"] = ss.residual;
    summary["integral"] = grid.integral();
    summary["boundary_warning"] = grid.boundary_warning;
    json peaks = json::array();
    for (const auto& [re, im] : grid.local_maxima())
        peaks.push_back(json{{"re", re}, {"im", im}});
    summary["peaks"] = peaks;
    write_json(dir / "qfunc_summary.json", summary);
}

void append_events(const TrajectoryRecord& rec, const RunConfig& cfg, json& summary) {
    const auto events = detect_switches(rec, cfg.params, cfg.filter_fc, cfg.threshold_low,
                                        cfg.threshold_high);
    summary["n_switch_events"] = events.size();
    summary["switch_rate_mhz"] = switch_rate(events, rec);
}

void run_sme_traj(const RunConfig& cfg, const fs::path& dir, json& summary) {
    Liouvillian liou(cfg.params, cfg.variant);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, cfg.params);
    SmeOptions opt;
    opt.dt = cfg.dt;
    opt.t_final = cfg.t_final;
    opt.stride = cfg.stride;
    opt.burn_in = cfg.burn_in;
    opt.record_filter_fc = cfg.filter_fc;
    TrajectoryRecord rec =
        simulate_trajectory(rho0, liou, opt, NoiseSource(cfg.base_seed, 0));
    write_trajectory_csv((dir / "trajectory.csv").string(), rec);
    if (!rec.ok) throw std::runtime_error("trajectory aborted: " + rec.error);
    summary["n_samples"] = rec.size();
    append_events(rec, cfg, summary);
    write_json(dir / "trajectory_summary.json", summary);
}

void run_pfe_traj(const RunConfig& cfg, const fs::path& dir, json& summary) {
    PfeOptions opt;
    opt.dt = cfg.dt;
    opt.t_final = cfg.t_final;
    opt.stride = cfg.stride;
    opt.burn_in = cfg.burn_in;
    opt.n_y = cfg.pfe_n_y;
    opt.y_span_factor = cfg.pfe_y_span_factor;
    opt.record_filter_fc = cfg.filter_fc;
    opt.snapshot_times = cfg.snapshot_times;
    PfeRun run = simulate_pfe(cfg.params, opt, NoiseSource(cfg.base_seed, 0));
    write_trajectory_csv((dir / "trajectory.csv").string(), run.record);
    for (size_t k = 0; k < run.snapshots.size(); ++k)
        write_pfe_snapshot_csv((dir / ("snapshot_t" + std::to_string(k) + ".csv")).string(),
                               run.snapshots[k].second);
    if (!run.record.ok) throw std::runtime_error("pfe run aborted: " + run.record.error);
    summary["n_samples"] = run.record.size();
    summary["clipped_mass_rate_per_us"] = run.clipped_mass_rate;
    append_events(run.record, cfg, summary);
    write_json(dir / "trajectory_summary.json", summary);
}

void run_ensemble(const RunConfig& cfg, const fs::path& dir, json& summary) {
    Liouvillian liou(cfg.params, cfg.variant);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, cfg.params);

    EnsembleOptions opt;
    opt.n_traj = cfg.n_traj;
    opt.base_seed = cfg.base_seed;
    opt.workers = cfg.workers;
    opt.keep_records = cfg.keep_records;
    opt.sme.dt = cfg.dt;
    opt.sme.t_final = cfg.t_final;
    opt.sme.stride = cfg.stride;
    opt.sme.burn_in = cfg.burn_in;
    const int n_cp = 5;
    for (int k = 1; k <= n_cp; ++k)
        opt.checkpoint_times.push_back(cfg.t_final * k / n_cp);

    const EnsembleResult ens = ensemble_run(rho0, liou, opt);
    const MeSeries me = integrate_me(rho0, liou, cfg.dt, cfg.t_final,
                                     int(std::lround(cfg.t_final / cfg.dt / n_cp)));

    json dists = json::array();
    double final_dist = 0.0;
    for (size_t k = 0; k < ens.mean_states.size(); ++k) {
        // Match the ME sample at the same time.
        const double t = ens.checkpoint_times[k];
        size_t best = 0;
        for (size_t j = 0; j < me.times.size(); ++j)
            if (std::abs(me.times[j] - t) < std::abs(me.times[best] - t)) best = j;
        const double dist = trace_distance(ens.mean_states[k], me.states[best]);
        dists.push_back(json{{"t_us", t}, {"trace_distance", dist}});
        final_dist = dist;
    }

    summary["n_traj"] = ens.n_traj;
    summary["n_success"] = ens.n_success;
    summary["base_seed"] = cfg.base_seed;
    summary["params"] = params_json(cfg.params);
    summary["trace_distance_vs_me"] = final_dist;
    summary["trace_distance_checkpoints"] = dists;
    write_json(dir / "ensemble_summary.json", summary);
    for (size_t i = 0; i < ens.records.size(); ++i)
        write_trajectory_csv((dir / ("trajectory_" + std::to_string(i) + ".csv")).string(),
                             ens.records[i]);
}

void run_scaling(const RunConfig& cfg, const fs::path& dir, json& summary) {
    const ScalingStudy study = scaling_study(cfg.scaling, cfg.workers);
    std::vector<ScalingPoint> all;
    for (const auto& sweep : study.g_sweeps)
        all.insert(all.end(), sweep.begin(), sweep.end());
    all.insert(all.end(), study.eta_sweep.begin(), study.eta_sweep.end());
    write_scaling_csv((dir / "scaling_points.csv").string(), all);

    json fits = json::array();
    for (const auto& f : study.g_fits) fits.push_back(scaling_fit_json(f));
    summary["g_fits"] = fits;
    summary["eta_fit"] = scaling_fit_json(study.eta_fit);
    summary["gamma_pair_ratios"] = study.gamma_pair_ratios;
    write_json(dir / "exponents.json", summary);
}

}  // namespace

RunOutcome run(const RunConfig& cfg_in) {
    RunOutcome outcome;
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = cfg_in;
    fs::path dir(cfg.output_dir);
    try {
        cfg.resolve();
        cfg.validate();
        fs::create_directories(dir);
        write_meta(dir, cfg, true, 0.0);

        json summary;
        switch (cfg.mode) {
            case RunMode::MeSteady: run_me_steady(cfg, dir, summary); break;
            case RunMode::Qfunc: run_qfunc(cfg, dir, summary); break;
            case RunMode::SmeTraj: run_sme_traj(cfg, dir, summary); break;
            case RunMode::PfeTraj: run_pfe_traj(cfg, dir, summary); break;
            case RunMode::Ensemble: run_ensemble(cfg, dir, summary); break;
            case RunMode::Scaling: run_scaling(cfg, dir, summary); break;
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_meta(dir, cfg, false, wall);
        outcome.message = "ok";
    } catch (const std::exception& e) {
        outcome.exit_code = 1;
        outcome.message = e.what();
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (fs::exists(dir)) write_meta(dir, cfg, true, wall, e.what());
    }
    return outcome;
}

}  // namespace rqj
