#include "rqj/sme.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rqj/reduce.hpp"

namespace rqj {

namespace {

// tr(a b) without forming the product.
inline Cplx trace_product(const Mat& a, const Mat& b) {
    return (a.array() * b.transpose().array()).sum();
}

struct StepWorkspace {
    Mat drift, scratch, t_a;
};

// Advances rho by one Euler-Maruyama step; returns <y> of the pre-step state.
inline double advance(Mat& rho, const Liouvillian& liou, double dt, double dW,
                      double meas_strength, StepWorkspace& ws) {
    const Cplx i(0.0, 1.0);
    liou.apply_into(rho, ws.drift, ws.scratch);
    ws.t_a.noalias() = liou.ops().a * rho;
    const double ey = 2.0 * std::imag(ws.t_a.trace());

    const double coeff = meas_strength * dW;
    rho *= (1.0 - coeff * ey);
    rho += dt * ws.drift;
    if (coeff != 0.0) {
        ws.scratch = ws.t_a.adjoint();
        rho += (-i * coeff) * (ws.t_a - ws.scratch);
    }

    ws.scratch = rho.adjoint();
    rho += ws.scratch;
    rho *= 0.5;
    const double tr = rho.trace().real();
    if (!std::isfinite(tr) || std::abs(tr) < 1e-12)
        throw std::runtime_error("sme_step: non-finite state (instability)");
    rho /= tr;
    return ey;
}

}  // namespace

Mat sme_step(const Mat& rho, const Liouvillian& liou, double dt, double dW) {
    if (rho.rows() != liou.dim() || rho.cols() != liou.dim())
        throw std::invalid_argument("sme_step: dimension mismatch");
    if (!std::isfinite(dW)) throw std::invalid_argument("sme_step: non-finite dW");
    check_step_size(liou, dt);
    const auto& p = liou.params();
    StepWorkspace ws;
    Mat out = rho;
    advance(out, liou, dt, dW, std::sqrt(2.0 * p.kappa * p.eta), ws);
    return out;
}

TrajectoryRecord simulate_trajectory(const Mat& rho0, const Liouvillian& liou,
                                     const SmeOptions& opt, NoiseSource noise,
                                     const std::vector<double>* checkpoint_times,
                                     std::vector<Mat>* checkpoint_states) {
    if (rho0.rows() != liou.dim() || rho0.cols() != liou.dim())
        throw std::invalid_argument("simulate_trajectory: dimension mismatch");
    check_step_size(liou, opt.dt);

    const auto& p = liou.params();
    const double meas_strength = std::sqrt(2.0 * p.kappa * p.eta);
    const double current_gain = 2.0 * p.kappa * p.eta;
    const long n_steps = std::lround(opt.t_final / opt.dt);
    const int stride = std::max(1, opt.stride);

    TrajectoryRecord rec;
    rec.step_dt = opt.dt;
    rec.sample_dt = stride * opt.dt;
    const size_t n_samples = size_t((n_steps + stride - 1) / stride);
    rec.times.reserve(n_samples);
    rec.photocurrent.reserve(n_samples);
    rec.y_mean.reserve(n_samples);
    rec.p_plus.reserve(n_samples);
    rec.entropy_s.reserve(n_samples);
    rec.xi.reserve(n_samples);

    const bool filtered = opt.record_filter_fc > 0.0;
    double filt_gain = 0.0, filt_i = 0.0, filt_xi = 0.0;
    if (filtered) {
        rec.filter_fc = opt.record_filter_fc;
        filt_gain = 1.0 - std::exp(-2.0 * std::numbers::pi * opt.record_filter_fc * opt.dt);
        rec.photocurrent_filtered.reserve(n_samples);
        rec.xi_filtered.reserve(n_samples);
    }

    std::vector<long> cp_steps;
    if (checkpoint_times && checkpoint_states) {
        checkpoint_states->clear();
        for (double t : *checkpoint_times) cp_steps.push_back(std::lround(t / opt.dt));
    }

    Mat rho = hermitized(rho0);
    rho /= rho.trace().real();
    StepWorkspace ws;
    size_t cp_next = 0;
    while (cp_next < cp_steps.size() && cp_steps[cp_next] <= 0) {
        checkpoint_states->push_back(rho);
        ++cp_next;
    }

    for (long step = 0; step < n_steps; ++step) {
        const double dW = noise.wiener_increment(opt.dt);
        const double xi = dW / opt.dt;
        const bool record = (step % stride == 0);

        double ey = 0.0;
        try {
            if (record) {
                // Pre-step conditional means belong to this sample.
                ws.t_a.noalias() = liou.ops().a * rho;
                ey = 2.0 * std::imag(ws.t_a.trace());
                const double pp =
                    std::real(trace_product(rho, liou.ops().proj_plus));
                rec.times.push_back(step * opt.dt);
                rec.y_mean.push_back(ey);
                rec.p_plus.push_back(pp);
                rec.entropy_s.push_back(pp - pp * pp);
                rec.xi.push_back(xi);
                rec.photocurrent.push_back(current_gain * ey + meas_strength * xi);
            }
            ey = advance(rho, liou, opt.dt, dW, meas_strength, ws);
        } catch (const std::runtime_error& e) {
            rec.ok = false;
            rec.error = e.what();
            break;
        }

        if (filtered) {
            const double i_now = current_gain * ey + meas_strength * xi;
            filt_i += filt_gain * (i_now - filt_i);
            filt_xi += filt_gain * (xi - filt_xi);
            if (record) {
                rec.photocurrent_filtered.push_back(filt_i);
                rec.xi_filtered.push_back(filt_xi);
            }
        }

        while (cp_next < cp_steps.size() && cp_steps[cp_next] == step + 1) {
            checkpoint_states->push_back(rho);
            ++cp_next;
        }
    }

    rec.burn_in_samples = 0;
    for (size_t k = 0; k < rec.times.size() && rec.times[k] < opt.burn_in; ++k)
        ++rec.burn_in_samples;
    return rec;
}

namespace {

struct CheckpointSum {
    std::vector<Mat> states;
    int count = 0;

    CheckpointSum operator+(const CheckpointSum& other) const {
        if (count == 0) return other;
        if (other.count == 0) return *this;
        CheckpointSum out;
        out.count = count + other.count;
        out.states.resize(states.size());
        for (size_t i = 0; i < states.size(); ++i) out.states[i] = states[i] + other.states[i];
        return out;
    }
};

}  // namespace

EnsembleResult ensemble_run(const Mat& rho0, const Liouvillian& liou,
                            const EnsembleOptions& opt) {
    if (opt.n_traj < 1) throw std::invalid_argument("ensemble_run: n_traj must be >= 1");
    std::vector<double> cp_times = opt.checkpoint_times;
    if (cp_times.empty()) cp_times.push_back(opt.sme.t_final);

    const int keep = std::min(opt.keep_records, opt.n_traj);
    const size_t chunk_size = 8;
    const size_t n_chunks = (size_t(opt.n_traj) + chunk_size - 1) / chunk_size;

    EnsembleResult result;
    result.n_traj = opt.n_traj;
    result.checkpoint_times = cp_times;
    result.records.resize(keep);

    std::vector<CheckpointSum> chunk_sums(n_chunks);
    parallel_for(n_chunks, opt.workers, [&](size_t c) {
        std::vector<CheckpointSum> leaves;
        const size_t begin = c * chunk_size;
        const size_t end = std::min(begin + chunk_size, size_t(opt.n_traj));
        for (size_t traj = begin; traj < end; ++traj) {
            NoiseSource noise(opt.base_seed, traj);
            CheckpointSum leaf;
            TrajectoryRecord rec = simulate_trajectory(rho0, liou, opt.sme, noise,
                                                       &cp_times, &leaf.states);
            leaf.count = rec.ok ? 1 : 0;
            if (!rec.ok) leaf.states.clear();
            if (int(traj) < keep) result.records[traj] = std::move(rec);
            leaves.push_back(std::move(leaf));
        }
        chunk_sums[c] = pairwise_reduce(std::move(leaves));
    });

    CheckpointSum total = pairwise_reduce(std::move(chunk_sums));
    result.n_success = total.count;
    if (total.count > 0) {
        result.mean_states.resize(total.states.size());
        for (size_t i = 0; i < total.states.size(); ++i)
            result.mean_states[i] = total.states[i] / double(total.count);
    }
    return result;
}

}  // namespace rqj
