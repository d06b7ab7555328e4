#include <doctest.h>

#include <cmath>
#include <random>

#include "bpdn/errors.hpp"
#include "bpdn/iga.hpp"
#include "bpdn/model.hpp"
#include "oracles.hpp"

using namespace bpdn;

namespace {

DiagGaussianState random_aux(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    DiagGaussianState s{Vector(n), Vector(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        s.lambda(k) = g(rng);
        s.inv_prec(k) = u(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("belief at zero auxiliary variance") {
    Vector a(3);
    a << 0.5, -1.0, 2.0;
    const DiagGaussianState aux{Vector::Random(3), Vector::Zero(3)};
    const Belief b = compute_belief_row(a, 0.7, aux);
    for (Eigen::Index k = 0; k < 3; ++k) {
        CHECK(b.xi(k) == doctest::Approx(a(k) * 0.7).epsilon(1e-15));
        CHECK(b.xi_diag(k) == doctest::Approx(a(k) * a(k)).epsilon(1e-15));
    }
}

TEST_CASE("belief with zero coefficients") {
    Vector a(4);
    a << 0.0, 1.0, 0.0, -0.5;
    std::mt19937_64 rng(1);
    const Belief b = compute_belief_row(a, 1.3, random_aux(rng, 4));
    CHECK(b.xi(0) == 0.0);
    CHECK(b.xi_diag(0) == 0.0);
    CHECK(b.xi(2) == 0.0);
    CHECK(b.xi_diag(2) == 0.0);
    CHECK(b.xi_diag(1) > 0.0);
}

TEST_CASE("belief matches the dense-inverse oracle") {
    Vector e1 = Vector::Zero(4);
    e1(0) = 1.0;
    const DiagGaussianState unit{Vector::Zero(4), Vector::Ones(4)};
    const Belief closed = compute_belief_row(e1, 1.0, unit);
    CHECK(closed.xi_diag(0) == doctest::Approx(1.0));
    CHECK(closed.xi(0) == doctest::Approx(1.0));
    CHECK(closed.xi_diag.tail(3).cwiseAbs().maxCoeff() == 0.0);
    const Belief dense_e1 = compute_belief_row_dense_oracle(e1, 1.0, unit);
    CHECK((dense_e1.xi_diag - closed.xi_diag).cwiseAbs().maxCoeff() < 1e-12);

    const auto inst = generate_instance({8, 16, 0.25, 20.0, 0.05, 7});
    std::mt19937_64 rng(7);
    for (Eigen::Index m = 0; m < 8; ++m) {
        const auto aux = random_aux(rng, 16);
        const Vector row = inst.a.row(m).transpose();
        const Belief fast = compute_belief_row(row, inst.y(m), aux);
        const Belief dense = compute_belief_row_dense_oracle(row, inst.y(m), aux);
        CHECK((fast.xi - dense.xi).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((fast.xi_diag - dense.xi_diag).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("dense oracle guards") {
    Vector a = Vector::Ones(3);
    DiagGaussianState aux{Vector::Zero(3), Vector::Ones(3)};
    aux.inv_prec(1) = 0.0;
    CHECK_THROWS_AS(compute_belief_row_dense_oracle(a, 1.0, aux), OracleError);
    const DiagGaussianState wrong{Vector::Zero(2), Vector::Ones(2)};
    CHECK_THROWS_AS(compute_belief_row(a, 1.0, wrong), ConfigError);
}

TEST_CASE("non-finite belief reports the row") {
    Vector a = Vector::Ones(2);
    DiagGaussianState aux{Vector::Zero(2), Vector::Ones(2)};
    aux.lambda(0) = INFINITY;
    try {
        compute_belief_row(a, 1.0, aux, 5);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.row() == 5);
    }
}

TEST_CASE("first undamped step sums the unit-variance beliefs") {
    const auto inst = generate_instance({6, 10, 0.3, 20.0, 0.05, 4});
    const IgaState s0 = init_iga_state(inst);
    const IgaState s1 = iga_step(s0, inst, IgaConfig{});
    Vector expected = Vector::Zero(10);
    const DiagGaussianState unit{Vector::Zero(10), Vector::Ones(10)};
    for (Eigen::Index m = 0; m < 6; ++m) {
        expected += compute_belief_row(inst.a.row(m).transpose(), inst.y(m), unit).xi;
    }
    CHECK((s1.extra_lambda_hat - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(s1.iter == 1);
}

TEST_CASE("e-condition holds after every undamped step") {
    const auto inst = generate_instance({16, 32, 0.1, 20.0, 0.05, 8});
    IgaState s = init_iga_state(inst);
    for (int t = 0; t < 40; ++t) {
        s = iga_step(s, inst, IgaConfig{});
        CHECK(e_condition_residual(s) <= 1e-10 * 16);
    }
}

TEST_CASE("damped run reaches the LASSO solution") {
    const auto inst = generate_instance({8, 16, 0.25, 20.0, 0.05, 3});
    IgaConfig cfg;
    cfg.max_iter = 30;
    cfg.tol = 0.0;
    cfg.damping = 0.7;
    const auto trace = run_iga(inst, cfg);
    CHECK(trace.iterations() == 30);
    const Vector ref = oracle::lasso_prox_grad(inst);
    CHECK((trace.final_estimate() - ref).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("identity design with tiny kappa recovers h") {
    ProblemInstance inst;
    inst.a = Matrix::Identity(4, 4);
    Vector h(4);
    h << 0.0, 1.5, 0.0, -0.7;
    inst.y = h;
    inst.kappa = 1e-6;
    inst.h_true = h;
    IgaConfig cfg;
    cfg.tol = 1e-12;
    const auto trace = run_iga(inst, cfg);
    CHECK(trace.converged);
    CHECK((trace.final_estimate() - h).cwiseAbs().maxCoeff() <= 1e-3);
    CHECK((trace.final_estimate() - oracle::lasso_prox_grad(inst)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("zero iterations returns the initial state") {
    const auto inst = generate_instance({4, 8, 0.25, 20.0, 0.05, 1});
    IgaConfig cfg;
    cfg.max_iter = 0;
    const auto trace = run_iga(inst, cfg);
    REQUIRE(trace.records.size() == 1);
    CHECK(trace.final_estimate().isZero(0.0));
}

TEST_CASE("NMSE falls over the first iterations at desk scale") {
    const auto inst = generate_instance({128, 256, 0.05, 40.0, 0.05, 1});
    IgaConfig cfg;
    cfg.max_iter = 5;
    cfg.tol = 0.0;
    const auto trace = run_iga(inst, cfg);
    REQUIRE(trace.records.size() == 6);
    // Record 0 is the zero initial state, not an iterate.
    for (std::size_t t = 2; t < trace.records.size(); ++t) {
        CHECK(*trace.records[t].nmse < *trace.records[t - 1].nmse);
    }
}

TEST_CASE("m-condition") {
    const auto inst = generate_instance({8, 16, 0.05, 20.0, 0.05, 3});
    CHECK(check_m_condition(init_iga_state(oracle::random_instance(8, 16, 0.05, 1)),
                            oracle::random_instance(8, 16, 0.05, 1)) > 0.0);

    IgaConfig cfg;
    cfg.max_iter = 2000;
    cfg.tol = 1e-10;
    IgaState fixed;
    const auto trace = run_iga(inst, cfg, fixed);
    REQUIRE(trace.converged);
    CHECK(check_m_condition(fixed, inst) <= 1e-6);

    const auto single = generate_instance({1, 4, 0.5, 20.0, 0.05, 2});
    cfg.tol = 1e-12;
    IgaState one;
    REQUIRE(run_iga(single, cfg, one).converged);
    CHECK(check_m_condition(one, single) <= 1e-10);
    CHECK(one.clamp_events > 0);
}

TEST_CASE("stopping rule waits for the extra point under damping") {
    // At this kappa the first damped iterates are all zero while the
    // precisions are still moving; the rule must not stop there.
    const auto inst = generate_instance({8, 16, 0.1, 20.0, 0.05, 0});
    IgaConfig cfg;
    cfg.max_iter = 20000;
    cfg.tol = 1e-12;
    cfg.damping = 0.5;
    const auto trace = run_iga(inst, cfg);
    REQUIRE(trace.converged);
    CHECK(trace.iterations() > 2);
    CHECK((trace.final_estimate() - oracle::lasso_prox_grad(inst)).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("runs are bit-identical") {
    const auto inst = generate_instance({16, 32, 0.1, 20.0, 0.05, 5});
    IgaConfig cfg;
    cfg.max_iter = 25;
    cfg.damping = 0.8;
    const auto a = run_iga(inst, cfg);
    const auto b = run_iga(inst, cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t t = 0; t < a.records.size(); ++t) CHECK(a.records[t].estimate == b.records[t].estimate);
}

TEST_CASE("config validation") {
    const auto inst = generate_instance({4, 8, 0.25, 20.0, 0.05, 1});
    IgaConfig cfg;
    cfg.damping = 0.0;
    CHECK_THROWS_AS(run_iga(inst, cfg), ConfigError);
    cfg.damping = 1.5;
    CHECK_THROWS_AS(run_iga(inst, cfg), ConfigError);
    cfg.damping = 1.0;
    cfg.tol = -1.0;
    CHECK_THROWS_AS(run_iga(inst, cfg), ConfigError);
}

TEST_CASE("divergence carries the partial trace") {
    ProblemInstance inst;
    inst.a = Matrix::Constant(2, 2, 1e200);
    inst.y = Vector::Constant(2, 1e200);
    inst.kappa = 0.05;
    try {
        run_iga(inst, IgaConfig{});
        FAIL("expected divergence");
    } catch (const SolverDiverged& e) {
        CHECK(e.partial_trace().records.size() >= 1);
        CHECK(e.iter() >= 1);
    }
}
