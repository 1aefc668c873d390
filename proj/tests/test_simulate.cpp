#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wprime/simulate.hpp"

using namespace wprime;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

LpvStateSpace integrator() { return oracle::constant_model(scalar(0), scalar(1), scalar(1), scalar(0)); }

Trajectory constant_scenario(double ts, Eigen::Index n, double p, double u) {
    return Trajectory(ts, Matrix::Constant(n, 1, p), Matrix::Constant(n, 1, u));
}

/// Random in-domain p trajectory (smooth-ish random walk on [-1, 1]^np) and random input.
Trajectory random_scenario(std::mt19937_64& rng, const LpvStateSpace& model, double ts, Eigen::Index n) {
    Matrix p(n, static_cast<Eigen::Index>(model.n_p()));
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        double v = oracle::uniform(rng, -1, 1);
        for (Eigen::Index k = 0; k < n; ++k) {
            v = std::clamp(v + oracle::uniform(rng, -0.1, 0.1), -1.0, 1.0);
            p(k, j) = v;
        }
    }
    return Trajectory(ts, std::move(p), oracle::random_matrix(rng, n, static_cast<Eigen::Index>(model.n_u()), -1, 1));
}

}  // namespace

TEST_CASE("integrator: trapezoid sums from xi(0) = 0") {
    const auto model = integrator();
    const DiscretizationConfig cfg(0.5);
    const auto traj = constant_scenario(0.5, 5, 0.0, 1.0);
    const std::vector<double> want{0.25, 0.75, 1.25, 1.75, 2.25};
    const auto sigma = simulate_dt_from_xi(model, cfg, traj, Vector::Zero(1));
    const auto loop = simulate_dt_loop_oracle_from_xi(model, cfg, traj, Vector::Zero(1));
    for (int k = 0; k < 5; ++k) {
        CHECK((*sigma.y)(k, 0) == doctest::Approx(want[k]).epsilon(1e-15));
        CHECK(std::abs((*loop.y)(k, 0) - want[k]) <= 1e-12);
    }
}

TEST_CASE("integrator: x0 = 0 gives the exact ramp y(k) = k Ts") {
    const auto model = integrator();
    const DiscretizationConfig cfg(0.5);
    const auto traj = constant_scenario(0.5, 5, 0.0, 1.0);
    const auto sigma = simulate_dt(model, cfg, traj, Vector::Zero(1));
    const auto loop = simulate_dt_loop_oracle(model, cfg, traj, Vector::Zero(1));
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs((*sigma.y)(k, 0) - 0.5 * k) <= 1e-12);
        CHECK(std::abs((*loop.y)(k, 0) - 0.5 * k) <= 1e-12);
    }
    REQUIRE(sigma.xi);
    CHECK((*sigma.xi)(0, 0) == -1.0);  // (2/Ts) 0 - 0 - 1 * 1
}

TEST_CASE("zero input and zero state stay at zero") {
    std::mt19937_64 rng(21);
    const auto model = oracle::random_affine_model(rng, 3, 2, 2, 2);
    const DiscretizationConfig cfg(0.1);
    Trajectory traj = random_scenario(rng, model, 0.1, 50);
    traj.u.setZero();
    for (const auto& out : {simulate_dt(model, cfg, traj, Vector::Zero(3)),
                            simulate_dt_loop_oracle(model, cfg, traj, Vector::Zero(3))}) {
        CHECK(out.x->isZero(0.0));
        CHECK(out.y->isZero(0.0));
        CHECK(out.xi->isZero(0.0));
        CHECK(out.y->rows() == 50);
    }
}

TEST_CASE("property: reconstructed x(0) equals x0") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 50; ++i) {
        const Eigen::Index nx = 1 + i % 5;
        const auto model = oracle::random_affine_model(rng, nx, 1 + i % 3, 1 + i % 2, 1);
        const DiscretizationConfig cfg(i % 2 ? 0.1 : 0.5);
        const auto traj = random_scenario(rng, model, cfg.ts(), 3);
        const Vector x0 = oracle::random_matrix(rng, nx, 1, -5, 5);
        const auto out = simulate_dt(model, cfg, traj, x0);
        CHECK(oracle::max_abs(out.x->row(0).transpose() - x0) <= 1e-10);
        // and symbolically: Xxi xi(0) + Xu u(0) with xi(0) from the mapping
        const std::vector<double> p0{traj.p(0, 0)};
        const auto m = dt_step_matrices(model, p0, cfg);
        const Vector xi0 = initial_xi(model, p0, traj.u.row(0).transpose(), x0, cfg);
        CHECK(oracle::max_abs(m.Xxi * xi0 + m.Xu * traj.u.row(0).transpose() - x0) <= 1e-10);
    }
}

TEST_CASE("property: loop-solve engine reproduces the loop-free engine") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
        const auto model = oracle::random_affine_model(rng, 1 + i % 4, 1 + i % 2, 1 + i % 3, 1 + i % 2);
        const DiscretizationConfig cfg(i % 3 == 0 ? 0.5 : 0.05);
        const auto traj = random_scenario(rng, model, cfg.ts(), 100);
        const Vector x0 = oracle::random_matrix(rng, static_cast<Eigen::Index>(model.n_x()), 1, -1, 1);
        const auto a = simulate_dt(model, cfg, traj, x0);
        const auto b = simulate_dt_loop_oracle(model, cfg, traj, x0);
        const double scale = std::max(1.0, oracle::max_abs(*a.y));
        CHECK(oracle::max_abs(*a.y - *b.y) <= 1e-9 * scale);
        CHECK(oracle::max_abs(*a.x - *b.x) <= 1e-9 * std::max(1.0, oracle::max_abs(*a.x)));
    }
}

TEST_CASE("singular interconnection is rejected by both engines at k = 0") {
    const auto model = oracle::constant_model(scalar(20), scalar(1), scalar(1), scalar(0));
    const DiscretizationConfig cfg(0.1);
    const auto traj = constant_scenario(0.1, 4, 0.0, 1.0);
    CHECK_THROWS_WITH_AS(simulate_dt(model, cfg, traj, Vector::Zero(1)), doctest::Contains("step 0"),
                         WellposednessError);
    CHECK_THROWS_WITH_AS(simulate_dt_loop_oracle(model, cfg, traj, Vector::Zero(1)), doctest::Contains("step 0"),
                         WellposednessError);
}

TEST_CASE("singularity reached mid-trajectory names the step") {
    const LpvStateSpace model(PMatrixFunction(1, 1, 1, {{{1}, scalar(1.0)}}), PMatrixFunction::constant(scalar(1), 1),
                              PMatrixFunction::constant(scalar(1), 1), PMatrixFunction::zero(1, 1, 1),
                              SchedulingDomain({0.0}, {40.0}));
    Matrix p(4, 1);
    p << 0, 10, 20, 30;
    const Trajectory traj(0.1, p, Matrix::Ones(4, 1));
    CHECK_THROWS_WITH_AS(simulate_dt(model, DiscretizationConfig(0.1), traj, Vector::Zero(1)),
                         doctest::Contains("step 2"), WellposednessError);
    CHECK_THROWS_WITH_AS(simulate_dt_loop_oracle(model, DiscretizationConfig(0.1), traj, Vector::Zero(1)),
                         doctest::Contains("step 2"), WellposednessError);
}

TEST_CASE("input validation") {
    const auto model = integrator();
    const DiscretizationConfig cfg(0.1);
    CHECK_THROWS_WITH_AS(simulate_dt(model, cfg, constant_scenario(0.1, 3, 1.5, 1.0), Vector::Zero(1)),
                         doctest::Contains("step 0"), DomainError);
    CHECK_THROWS_AS(simulate_dt(model, cfg, constant_scenario(0.1, 3, 0.5, 1.0), Vector::Zero(2)), ModelError);
    CHECK_THROWS_AS(simulate_dt(model, cfg, constant_scenario(0.2, 3, 0.5, 1.0), Vector::Zero(1)), DomainError);
    CHECK_THROWS_AS(Trajectory(0.1, Matrix::Zero(3, 1), Matrix::Zero(2, 1)), ModelError);
}

TEST_CASE("property: frozen p matches stepping the Tustin matrices") {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 40; ++i) {
        const auto model = oracle::random_affine_model(rng, 1 + i % 4, 1 + i % 2, 1 + i % 3, 1);
        const DiscretizationConfig cfg(0.1);
        Trajectory traj = random_scenario(rng, model, 0.1, 200);
        traj.p.setConstant(oracle::uniform(rng, -1, 1));
        const Vector x0 = oracle::random_matrix(rng, static_cast<Eigen::Index>(model.n_x()), 1, -1, 1);
        const auto w = simulate_dt(model, cfg, traj, x0);
        const auto t = simulate_tustin(model, cfg, traj, x0);
        CHECK(oracle::max_abs(*w.y - *t.y) <= 1e-10 * std::max(1.0, oracle::max_abs(*w.y)));
    }
}

TEST_CASE("property: superposition with zero initial state") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 30; ++i) {
        const auto model = oracle::random_affine_model(rng, 1 + i % 4, 2, 2, 1);
        const DiscretizationConfig cfg(0.05);
        const auto t1 = random_scenario(rng, model, 0.05, 150);
        Trajectory t2 = t1;
        t2.u = oracle::random_matrix(rng, 150, 2, -1, 1);
        const double alpha = oracle::uniform(rng, -2, 2), beta = oracle::uniform(rng, -2, 2);
        Trajectory mix = t1;
        mix.u = alpha * t1.u + beta * t2.u;
        const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(model.n_x()));
        const Matrix y1 = *simulate_dt(model, cfg, t1, x0).y;
        const Matrix y2 = *simulate_dt(model, cfg, t2, x0).y;
        const Matrix ym = *simulate_dt(model, cfg, mix, x0).y;
        const Matrix want = alpha * y1 + beta * y2;
        CHECK(oracle::max_abs(ym - want) <= 1e-10 * std::max(1.0, oracle::max_abs(want)));
    }
}

TEST_CASE("CT reference integrator") {
    SUBCASE("integrates a constant input exactly") {
        const auto out = simulate_ct_reference(integrator(), {parse_signal_spec("const:amp=0.5")},
                                               {parse_signal_spec("const:amp=1")}, Vector::Zero(1), 2.0, 3,
                                               DiscretizationConfig(0.25));
        REQUIRE(out.size() == 9);
        for (Eigen::Index k = 0; k < 9; ++k) CHECK(std::abs((*out.y)(k, 0) - 0.25 * k) <= 1e-14);
    }
    SUBCASE("decay reaches exp(-1)") {
        const auto lag = oracle::constant_model(scalar(-1), scalar(1), scalar(1), scalar(0));
        const auto out = simulate_ct_reference(lag, {parse_signal_spec("const")}, {parse_signal_spec("const")},
                                               Vector::Ones(1), 1.0, 100, DiscretizationConfig(0.1));
        CHECK(std::abs((*out.x)(10, 0) - 0.36787944117144233) <= 1e-9);
    }
    SUBCASE("fourth order: doubling oversample cuts the error by about 16") {
        const auto lag = oracle::constant_model(scalar(-1), scalar(1), scalar(1), scalar(0));
        double prev = 0.0;
        for (int os : {2, 4, 8}) {
            const auto out = simulate_ct_reference(lag, {parse_signal_spec("const")}, {parse_signal_spec("const")},
                                                   Vector::Ones(1), 1.0, os, DiscretizationConfig(0.1));
            const double err = std::abs((*out.x)(10, 0) - std::exp(-1.0));
            if (prev > 0.0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.1));
            prev = err;
        }
    }
    SUBCASE("scheduling leaves the domain") {
        CHECK_THROWS_AS(simulate_ct_reference(integrator(), {parse_signal_spec("sine:amp=2,f=1")},
                                              {parse_signal_spec("const")}, Vector::Zero(1), 1.0, 2,
                                              DiscretizationConfig(0.1)),
                        DomainError);
    }
}

TEST_CASE("trajectory CSV") {
    const auto model = integrator();
    SUBCASE("round trip through the engines") {
        const auto traj = parse_trajectory_csv("k,t,p1,u1\n0,0,0,1\n1,0.5,0,1\n2,1,0,1\n", model, 0.5);
        CHECK(traj.size() == 3);
        const auto out = simulate_dt(model, DiscretizationConfig(0.5), traj, Vector::Zero(1));
        CHECK(format_trajectory_csv(out, false) == "k,t,y1\n0,0,0\n1,0.5,0.5\n2,1,1\n");
        const std::string with_state = format_trajectory_csv(out, true);
        CHECK(with_state.rfind("k,t,y1,x1,xi1\n0,0,0,0,-1\n", 0) == 0);
    }
    SUBCASE("bad header") {
        CHECK_THROWS_AS(parse_trajectory_csv("k,t,u1,p1\n0,0,0,1\n", model, 0.5), IoError);
    }
    SUBCASE("t column must match k Ts") {
        CHECK_THROWS_WITH_AS(parse_trajectory_csv("k,t,p1,u1\n0,0,0,1\n1,0.6,0,1\n", model, 0.5),
                             doctest::Contains("expected k*Ts"), IoError);
    }
    SUBCASE("k must count up from zero") {
        CHECK_THROWS_AS(parse_trajectory_csv("k,t,p1,u1\n1,0.5,0,1\n", model, 0.5), IoError);
    }
    SUBCASE("channel lookup") {
        const auto traj = constant_scenario(0.5, 2, 0.0, 1.0);
        CHECK_THROWS_AS(traj.channel("y"), ModelError);
        CHECK_THROWS_AS(traj.channel("z"), ModelError);
        CHECK(traj.channel("u")(1, 0) == 1.0);
    }
}
