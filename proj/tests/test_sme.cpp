#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rqj/sme.hpp"
#include "test_util.hpp"

using namespace rqj;
using rqj::testing::near;
using rqj::testing::paper_params;

TEST_CASE("with the detector off a conditional step is a deterministic step") {
    SystemParams p = paper_params();
    p.eta = 0.0;
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);

    SmeOptions opt;
    opt.dt = 1e-4;
    opt.t_final = 0.2;
    opt.stride = 1 << 20;
    std::vector<double> cps{opt.t_final};
    std::vector<Mat> states;
    simulate_trajectory(rho0, liou, opt, NoiseSource(1, 0), &cps, &states);
    REQUIRE(states.size() == 1);

    const MeSeries me = integrate_me(rho0, liou, opt.dt, opt.t_final, 1 << 20);
    // Euler drift vs RK4; first-order discretization gap only.
    CHECK(trace_distance(states[0], me.states.back()) < 2e-3);
}

TEST_CASE("conditional step keeps the trace pinned") {
    const SystemParams p = paper_params();
    const Liouvillian liou(p, Variant::Rwa);
    Mat rho = reference_state(FixedPointBranch::Plus, p);
    NoiseSource noise(3, 0);
    for (int k = 0; k < 50; ++k) {
        rho = sme_step(rho, liou, 1e-4, noise.wiener_increment(1e-4));
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
        CHECK((rho - rho.adjoint()).norm() < 1e-14);
    }
}

TEST_CASE("positive noise pushes the upper dressed population down") {
    // Once damping has produced a minority component, its field has drifted
    // upward in y, so Delta_y < 0 and a positive innovation must lower p_+.
    const SystemParams p = paper_params();
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);
    const MeSeries warm = integrate_me(rho0, liou, 1e-4, 0.02, 1 << 20);
    const Mat rho = warm.states.back();

    const double dt = 1e-4;
    const Mat up = sme_step(rho, liou, dt, +std::sqrt(dt));
    const Mat flat = sme_step(rho, liou, dt, 0.0);
    const Mat down = sme_step(rho, liou, dt, -std::sqrt(dt));
    const auto pp = [&](const Mat& r) {
        return std::real(expectation(r, liou.ops().proj_plus));
    };
    CHECK(pp(up) < pp(flat));
    CHECK(pp(down) > pp(flat));
}

TEST_CASE("recorded noise is white with variance 1/dt") {
    // Undriven, uncoupled vacuum: the record is pure measurement noise.
    SystemParams p = paper_params(Frame::Lab);
    p.g = 0.0;
    p.drive = 0.0;
    p.gamma_perp = 0.0;
    p.n_max = 2;
    const Liouvillian liou(p, Variant::Full);
    Mat rho0 = Mat::Zero(liou.dim(), liou.dim());
    rho0(0, 0) = 1.0;

    SmeOptions opt;
    opt.dt = 1e-4;
    opt.t_final = 10.0;
    opt.stride = 1;
    const TrajectoryRecord rec = simulate_trajectory(rho0, liou, opt, NoiseSource(7, 4));
    REQUIRE(rec.ok);
    REQUIRE(rec.xi.size() == 100000);

    double mean = 0.0;
    for (double x : rec.xi) mean += x;
    mean /= double(rec.xi.size());
    double var = 0.0;
    for (double x : rec.xi) var += (x - mean) * (x - mean);
    var /= double(rec.xi.size() - 1);
    CHECK(std::abs(var * opt.dt - 1.0) < 0.05);
    CHECK(std::abs(mean) < 3.0 * std::sqrt(1.0 / opt.dt / double(rec.xi.size())));
}

TEST_CASE("photocurrent samples satisfy the measurement identity exactly") {
    const SystemParams p = paper_params();
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);
    SmeOptions opt;
    opt.dt = 1e-4;
    opt.t_final = 0.05;
    opt.stride = 3;
    const TrajectoryRecord rec = simulate_trajectory(rho0, liou, opt, NoiseSource(11, 2));
    const double gain = 2.0 * p.kappa * p.eta;
    const double noise_gain = std::sqrt(2.0 * p.kappa * p.eta);
    REQUIRE(!rec.times.empty());
    for (size_t k = 0; k < rec.times.size(); ++k)
        CHECK(rec.photocurrent[k] == gain * rec.y_mean[k] + noise_gain * rec.xi[k]);

    // Uniform sample spacing.
    for (size_t k = 1; k < rec.times.size(); ++k)
        CHECK(near(rec.times[k] - rec.times[k - 1], rec.sample_dt, 1e-12));
}

TEST_CASE("identical seed and stream reproduce the record bit for bit") {
    const SystemParams p = paper_params();
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);
    SmeOptions opt;
    opt.dt = 1e-4;
    opt.t_final = 0.05;
    opt.stride = 5;

    const TrajectoryRecord a = simulate_trajectory(rho0, liou, opt, NoiseSource(42, 9));
    const TrajectoryRecord b = simulate_trajectory(rho0, liou, opt, NoiseSource(42, 9));
    const TrajectoryRecord c = simulate_trajectory(rho0, liou, opt, NoiseSource(42, 10));
    REQUIRE(a.xi.size() == b.xi.size());
    CHECK(a.xi == b.xi);
    CHECK(a.photocurrent == b.photocurrent);
    CHECK(a.p_plus == b.p_plus);
    CHECK(a.xi != c.xi);
}

TEST_CASE("conditional state stays physical and dwells at the attractors") {
    const SystemParams p = paper_params();
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);
    SmeOptions opt;
    opt.dt = 1e-4;
    opt.t_final = 5.0;
    opt.stride = 10;
    std::vector<double> cps{1.0, 3.0, 5.0};
    std::vector<Mat> states;
    const TrajectoryRecord rec =
        simulate_trajectory(rho0, liou, opt, NoiseSource(2024, 0), &cps, &states);
    REQUIRE(rec.ok);

    for (const Mat& rho : states) CHECK(purity(rho) < 1.0 + 1e-8);
    size_t near_attractor = 0;
    for (size_t k = 0; k < rec.size(); ++k) {
        CHECK(rec.entropy_s[k] > -1e-10);
        CHECK(rec.entropy_s[k] < 0.25 + 1e-10);
        if (std::abs(rec.y_mean[k] - 3.0) < 0.5 || std::abs(rec.y_mean[k] + 3.0) < 0.5)
            ++near_attractor;
    }
    CHECK(double(near_attractor) / double(rec.size()) > 0.8);
}

TEST_CASE("without spontaneous emission the initial attractor is never left") {
    SystemParams p = paper_params();
    p.gamma_perp = 0.0;
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);
    SmeOptions opt;
    opt.dt = 1e-4;
    opt.t_final = 5.0;
    opt.stride = 10;
    const TrajectoryRecord rec = simulate_trajectory(rho0, liou, opt, NoiseSource(5, 5));
    REQUIRE(rec.ok);
    for (double pp : rec.p_plus) CHECK(pp >= 0.99);
}

TEST_CASE("ensemble mean reproduces the unconditional evolution") {
    SystemParams p = paper_params();
    p.n_max = 6;  // small joint space keeps this a quick statistical check
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);

    EnsembleOptions opt;
    opt.n_traj = 200;
    opt.base_seed = 99;
    opt.workers = 2;
    opt.sme.dt = 1e-4;
    opt.sme.t_final = 0.2;
    opt.sme.stride = 1 << 20;
    opt.checkpoint_times = {0.1, 0.2};
    const EnsembleResult ens = ensemble_run(rho0, liou, opt);
    REQUIRE(ens.n_success == 200);

    const MeSeries me = integrate_me(rho0, liou, opt.sme.dt, 0.2, 1000);
    CHECK(trace_distance(ens.mean_states[0], me.states[1]) < 3.0 * 0.5 / std::sqrt(200.0));
    CHECK(trace_distance(ens.mean_states[1], me.states[2]) < 3.0 * 0.5 / std::sqrt(200.0));
}

TEST_CASE("ensemble reduction is independent of the worker count") {
    SystemParams p = paper_params();
    p.n_max = 4;
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);

    EnsembleOptions opt;
    opt.n_traj = 21;  // deliberately not a multiple of the chunk size
    opt.base_seed = 123;
    opt.sme.dt = 1e-4;
    opt.sme.t_final = 0.05;
    opt.sme.stride = 1 << 20;
    opt.checkpoint_times = {0.05};

    opt.workers = 1;
    const EnsembleResult one = ensemble_run(rho0, liou, opt);
    opt.workers = 3;
    const EnsembleResult three = ensemble_run(rho0, liou, opt);
    CHECK((one.mean_states[0] - three.mean_states[0]).norm() == 0.0);

    // A single trajectory is its own mean.
    opt.n_traj = 1;
    opt.workers = 2;
    const EnsembleResult single = ensemble_run(rho0, liou, opt);
    std::vector<Mat> states;
    std::vector<double> cps{0.05};
    simulate_trajectory(rho0, liou, opt.sme, NoiseSource(123, 0), &cps, &states);
    CHECK((single.mean_states[0] - states[0]).norm() == 0.0);
}

TEST_CASE("step rejects bad input") {
    const SystemParams p = paper_params();
    const Liouvillian liou(p, Variant::Rwa);
    const Mat rho0 = reference_state(FixedPointBranch::Plus, p);
    CHECK_THROWS_AS(sme_step(rho0, liou, 1e-4, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(sme_step(rho0, liou, 0.05, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sme_step(Mat::Identity(4, 4), liou, 1e-4, 0.0), std::invalid_argument);
}
