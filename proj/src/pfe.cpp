#include "rqj/pfe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rqj {

double PfeState::total() const {
    double s = 0.0;
    for (size_t i = 0; i < p_plus.size(); ++i) s += p_plus[i] + p_minus[i];
    return s * dy;
}

void PfeState::renormalize() {
    double clipped = 0.0;
    for (auto* branch : {&p_plus, &p_minus})
        for (double& v : *branch)
            if (v < 0.0) {
                clipped -= v;
                v = 0.0;
            }
    clipped_mass += clipped * dy;
    const double t = total();
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::runtime_error("PfeState: total probability lost (instability)");
    const double inv = 1.0 / t;
    for (auto* branch : {&p_plus, &p_minus})
        for (double& v : *branch) v *= inv;
}

PfeState make_pfe_grid(double y_min, double y_max, int n_y) {
    if (n_y < 8 || !(y_max > y_min))
        throw std::invalid_argument("make_pfe_grid: bad grid spec");
    PfeState s;
    s.dy = (y_max - y_min) / n_y;
    s.y.resize(n_y);
    for (int i = 0; i < n_y; ++i) s.y[i] = y_min + (i + 0.5) * s.dy;
    s.p_plus.assign(n_y, 0.0);
    s.p_minus.assign(n_y, 0.0);
    return s;
}

void pfe_set_point_mass(PfeState& state, bool plus_branch, double y0) {
    std::fill(state.p_plus.begin(), state.p_plus.end(), 0.0);
    std::fill(state.p_minus.begin(), state.p_minus.end(), 0.0);
    const int n = int(state.y.size());
    int idx = int(std::lround((y0 - state.y.front()) / state.dy));
    idx = std::clamp(idx, 0, n - 1);
    (plus_branch ? state.p_plus : state.p_minus)[idx] = 1.0 / state.dy;
}

PfeMoments pfe_moments(const PfeState& state) {
    PfeMoments m;
    double wp = 0.0, wm = 0.0, yp = 0.0, ym = 0.0;
    for (size_t i = 0; i < state.y.size(); ++i) {
        wp += state.p_plus[i];
        wm += state.p_minus[i];
        yp += state.y[i] * state.p_plus[i];
        ym += state.y[i] * state.p_minus[i];
    }
    m.p_plus = wp * state.dy;
    m.p_minus = wm * state.dy;
    m.y_mean = (yp + ym) * state.dy;
    const double floor = 1e-12;
    m.y_mean_plus = (m.p_plus > floor) ? yp * state.dy / m.p_plus : 0.0;
    m.y_mean_minus = (m.p_minus > floor) ? ym * state.dy / m.p_minus : 0.0;
    // Empty-branch convention: no distinguishable branches, no signal.
    m.delta_y = (m.p_plus > floor && m.p_minus > floor) ? m.y_mean_plus - m.y_mean_minus : 0.0;
    m.entropy_s = m.p_plus - m.p_plus * m.p_plus;
    return m;
}

namespace {

// Donor-cell divergence of the advected flux for d_t P = d_y [A(y) P], i.e.
// transport with velocity v = -A. Zero inflow at the boundaries; outflow is
// absorbed.
void upwind_divergence(const std::vector<double>& y, double dy, double drift_sign, double g,
                       double kappa, const std::vector<double>& p, std::vector<double>& out) {
    const int n = int(p.size());
    const double y_left = y.front() - 0.5 * dy;
    auto face_flux = [&](int f) {  // face f between cells f-1 and f
        const double v = -(drift_sign * g + kappa * (y_left + f * dy));
        const double donor = v > 0.0 ? (f - 1 >= 0 ? p[f - 1] : 0.0)
                                     : (f < n ? p[f] : 0.0);
        return v * donor;
    };
    for (int i = 0; i < n; ++i) out[i] = -(face_flux(i + 1) - face_flux(i)) / dy;
}

}  // namespace

PfeStepStats pfe_step(PfeState& state, const SystemParams& params, double dt, double dW) {
    const int n = int(state.y.size());
    if (n == 0) throw std::invalid_argument("pfe_step: empty state");
    if (!std::isfinite(dW)) throw std::invalid_argument("pfe_step: non-finite dW");
    const double vmax =
        params.g + params.kappa * std::max(std::abs(state.y.front()), std::abs(state.y.back())) +
        0.5 * params.kappa * state.dy;
    if (vmax * dt > 0.8 * state.dy)
        throw std::invalid_argument("pfe_step: CFL violation, max|drift| dt = " +
                                    std::to_string(vmax * dt) + " > 0.8 dy");

    const PfeMoments m = pfe_moments(state);
    const double meas = std::sqrt(2.0 * params.kappa * params.eta) * dW;
    const double ex = 0.5 * params.gamma_perp * dt;
    const double total_before = state.total();

    static thread_local std::vector<double> adv_p, adv_m;
    adv_p.resize(n);
    adv_m.resize(n);
    upwind_divergence(state.y, state.dy, +1.0, params.g, params.kappa, state.p_plus, adv_p);
    upwind_divergence(state.y, state.dy, -1.0, params.g, params.kappa, state.p_minus, adv_m);

    for (int i = 0; i < n; ++i) {
        const double mult = meas * (state.y[i] - m.y_mean);
        const double pp = state.p_plus[i];
        const double pm = state.p_minus[i];
        state.p_plus[i] = pp + dt * adv_p[i] + mult * pp + ex * (pm - pp);
        state.p_minus[i] = pm + dt * adv_m[i] + mult * pm + ex * (pp - pm);
    }

    PfeStepStats stats;
    stats.pre_clip_total_error = std::abs(state.total() - total_before);
    const double clipped_before = state.clipped_mass;
    state.renormalize();
    stats.clipped_mass = state.clipped_mass - clipped_before;
    return stats;
}

PfeRun simulate_pfe(const SystemParams& params, const PfeOptions& opt, NoiseSource noise) {
    params.validate();
    const FixedPointPair fp = compute_fixed_points(params);
    const double span = opt.y_span_factor * params.g / params.kappa;
    PfeState state = make_pfe_grid(-span, span, opt.n_y);
    pfe_set_point_mass(state, true, fp.y_plus);

    const double meas_strength = std::sqrt(2.0 * params.kappa * params.eta);
    const double current_gain = 2.0 * params.kappa * params.eta;
    const long n_steps = std::lround(opt.t_final / opt.dt);
    const int stride = std::max(1, opt.stride);

    PfeRun run;
    TrajectoryRecord& rec = run.record;
    rec.step_dt = opt.dt;
    rec.sample_dt = stride * opt.dt;
    const size_t n_samples = size_t((n_steps + stride - 1) / stride);
    for (auto* v : {&rec.times, &rec.photocurrent, &rec.y_mean, &rec.p_plus, &rec.entropy_s,
                    &rec.xi, &rec.delta_y})
        v->reserve(n_samples);

    const bool filtered = opt.record_filter_fc > 0.0;
    double filt_gain = 0.0, filt_i = 0.0, filt_xi = 0.0;
    if (filtered) {
        rec.filter_fc = opt.record_filter_fc;
        filt_gain = 1.0 - std::exp(-2.0 * std::numbers::pi * opt.record_filter_fc * opt.dt);
        rec.photocurrent_filtered.reserve(n_samples);
        rec.xi_filtered.reserve(n_samples);
    }

    std::vector<long> snap_steps;
    for (double t : opt.snapshot_times) snap_steps.push_back(std::lround(t / opt.dt));
    size_t snap_next = 0;
    while (snap_next < snap_steps.size() && snap_steps[snap_next] <= 0) {
        run.snapshots.push_back({0.0, state});
        ++snap_next;
    }

    for (long step = 0; step < n_steps; ++step) {
        const double dW = noise.wiener_increment(opt.dt);
        const double xi = dW / opt.dt;
        const PfeMoments m = pfe_moments(state);
        const double i_now = current_gain * m.y_mean + meas_strength * xi;

        if (step % stride == 0) {
            rec.times.push_back(step * opt.dt);
            rec.photocurrent.push_back(i_now);
            rec.y_mean.push_back(m.y_mean);
            rec.p_plus.push_back(m.p_plus);
            rec.entropy_s.push_back(m.entropy_s);
            rec.xi.push_back(xi);
            rec.delta_y.push_back(m.delta_y);
        }

        try {
            pfe_step(state, params, opt.dt, dW);
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
            break;
        }

        if (filtered) {
            filt_i += filt_gain * (i_now - filt_i);
            filt_xi += filt_gain * (xi - filt_xi);
            if (step % stride == 0) {
                rec.photocurrent_filtered.push_back(filt_i);
                rec.xi_filtered.push_back(filt_xi);
            }
        }
        while (snap_next < snap_steps.size() && snap_steps[snap_next] == step + 1) {
            run.snapshots.push_back({(step + 1) * opt.dt, state});
            ++snap_next;
        }
    }

    rec.burn_in_samples = 0;
    for (size_t k = 0; k < rec.times.size() && rec.times[k] < opt.burn_in; ++k)
        ++rec.burn_in_samples;
    run.clipped_mass_rate = (opt.t_final > 0) ? state.clipped_mass / opt.t_final : 0.0;
    return run;
}

PplusOdeCheck check_p_plus_ode(const TrajectoryRecord& rec, const SystemParams& params) {
    PplusOdeCheck out;
    if (rec.delta_y.size() != rec.p_plus.size() || rec.xi.size() != rec.p_plus.size() ||
        rec.sample_dt != rec.step_dt || rec.p_plus.size() < 3) {
        out.resolution_ok = false;
        return out;
    }
    const double dt = rec.step_dt;
    const double s = std::sqrt(2.0 * params.kappa * params.eta);

    double sum_res2 = 0.0, sum_rate2 = 0.0;
    size_t sign_total = 0, sign_pass = 0;
    const size_t n = rec.p_plus.size() - 1;
    for (size_t k = 0; k < n; ++k) {
        const double pp = rec.p_plus[k];
        const double rate = (rec.p_plus[k + 1] - pp) / dt;
        const double model = s * rec.xi[k] * (pp - pp * pp) * rec.delta_y[k] -
                             params.gamma_perp * (pp - 0.5);
        const double res = rate - model;
        sum_res2 += res * res;
        sum_rate2 += rate * rate;
        if (rec.xi[k] > 0.0 && rec.delta_y[k] < 0.0) {
            ++sign_total;
            if (rec.p_plus[k + 1] - pp <= 0.5 * params.gamma_perp * dt) ++sign_pass;
        }
    }
    out.n_steps = n;
    // Guard the degenerate case where p_plus never moves beyond roundoff
    // (e.g. gamma_perp = 0 with the measurement term switched off).
    const double rate_scale = std::sqrt(sum_rate2 / double(n));
    out.rms_residual_normalized =
        (rate_scale > 1e-9) ? std::sqrt(sum_res2 / sum_rate2) : 0.0;
    out.sign_test_fraction = sign_total ? double(sign_pass) / double(sign_total) : 1.0;
    return out;
}

}  // namespace rqj
