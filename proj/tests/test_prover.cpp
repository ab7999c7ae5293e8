#include "doctest.h"

#include <random>

#include "ksc/oracle.hpp"
#include "ksc/prover.hpp"

using namespace ksc;

TEST_CASE("reference integrator basics") {
    oracle::Galerkin g{0.127, 20};
    Eigen::VectorXd z = oracle::galerkin_solve(g, Eigen::VectorXd::Zero(20), 1.0);
    CHECK(z.cwiseAbs().maxCoeff() == 0);

    Eigen::VectorXd u = Eigen::VectorXd::Zero(20);
    u(0) = 0.01;
    Eigen::VectorXd y = oracle::galerkin_solve(g, u, 0.1);
    CHECK(std::fabs(y(0) - 0.01 * std::exp(g.lambda(1) * 0.1)) < 1e-5);

    u = g.pad(default_seed());
    Eigen::VectorXd a = oracle::galerkin_solve(g, u, 0.5, 1e-9), b = oracle::galerkin_solve(g, u, 0.5, 5e-10);
    CHECK((a - b).cwiseAbs().maxCoeff() < 10 * 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff()));
}

TEST_CASE("first return time of the orbit") {
    oracle::Galerkin g{0.127, 18};
    oracle::ReturnPoint r = oracle::first_return(g, g.pad(default_seed()), 0, -1, 3.0, 1e-12);
    CHECK(r.t == doctest::Approx(1.1221668).epsilon(1e-6));
    CHECK(std::fabs(r.u(0)) < 1e-12);
    CHECK_THROWS(oracle::first_return(g, Eigen::VectorXd::Zero(18), 0, 1, 0.5));
}

TEST_CASE("finite difference Jacobians") {
    Eigen::MatrixXd M(2, 2);
    M << 1, 2, -3, 0.5;
    oracle::Map lin = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(M * x); };
    Eigen::MatrixXd D = oracle::finite_diff_jacobian(lin, Eigen::Vector2d(0.3, -1), 1e-5);
    CHECK((D - M).cwiseAbs().maxCoeff() < 1e-10);

    oracle::Galerkin g{0.127, 6};
    oracle::Map flow = [&](const Eigen::VectorXd& x) { return oracle::galerkin_solve(g, x, 0.1, 1e-12, 1e-24); };
    D = oracle::finite_diff_jacobian(flow, Eigen::VectorXd::Zero(6), 1e-5);
    for (int k = 0; k < 6; ++k) {
        CHECK(D(k, k) == doctest::Approx(std::exp(g.lambda(k + 1) * 0.1)).epsilon(1e-8));
        for (int j = 0; j < 6; ++j)
            if (j != k) CHECK(std::fabs(D(k, j)) < 1e-9);   // cubic terms of the flow, O(eps^2)
    }

    // second order: halving eps divides the error by about four
    oracle::Map cube = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(1);
        y(0) = std::sin(x(0));
        return y;
    };
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.7);
    double e1 = std::fabs(oracle::finite_diff_jacobian(cube, x0, 1e-4)(0, 0) - std::cos(0.7));
    double e2 = std::fabs(oracle::finite_diff_jacobian(cube, x0, 5e-5)(0, 0) - std::cos(0.7));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("configuration checks") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.q = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = RunConfig{};
    c.m = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = RunConfig{};
    c.nu = "abc";
    CHECK_THROWS(c.validate());
}

TEST_CASE("candidate search") {
    RunConfig cfg;
    Candidate c = find_candidate(cfg, default_seed());
    CHECK(c.residual < 1e-12);
    CHECK(c.u(0) == 0);
    CHECK(c.return_time == doctest::Approx(1.12216).epsilon(1e-4));
    CHECK(c.trace.front() > c.residual);

    Candidate again = find_candidate(cfg, c.u);
    CHECK(again.residual < 1e-12);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1e-4, 1e-4);
    Eigen::VectorXd seed = default_seed();
    for (int k = 1; k < seed.size(); ++k) seed(k) += U(rng);
    Candidate near = find_candidate(cfg, seed);
    CHECK((near.u - c.u).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("section frame") {
    RunConfig cfg;
    Candidate c = find_candidate(cfg, default_seed());
    SectionFrame fr = build_section_frame(c.u, cfg);
    CHECK(fr.A.rows() == cfg.m - 1);
    CHECK(fr.condition >= 1);
    CHECK(fr.condition < 1e8);
    CHECK(std::abs(fr.eigenvalues(0)) == doctest::Approx(0.5257).epsilon(1e-3));
}

TEST_CASE("a viscosity without the orbit fails gracefully") {
    RunConfig cfg;
    cfg.nu = "1";
    ProofReport r = certify_attracting_orbit(cfg);
    CHECK_FALSE(r.contraction);
    REQUIRE(r.stage("candidate") != nullptr);
    CHECK_FALSE(r.stage("candidate")->verdict);
    CHECK_FALSE(r.stage("candidate")->error.empty());
    for (const char* n : {"frame", "point_image", "schauder", "derivative", "double_return"}) {
        REQUIRE(r.stage(n) != nullptr);
        CHECK_FALSE(r.stage(n)->verdict);
    }
    nlohmann::json j = r.to_json();
    CHECK(j["contraction"] == false);
    CHECK(j["stages"].size() == 7);
}

TEST_CASE("report intervals round trip through decimal strings") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        Interval a = Interval::hull(U(rng) * std::pow(10.0, static_cast<int>(U(rng) * 20)), U(rng));
        Interval b = interval_from_json(nlohmann::json::parse(interval_json(a).dump()));
        CHECK(b.lo == a.lo);
        CHECK(b.hi == a.hi);
    }
    ProofReport rep;
    rep.norm_bound = Interval(0.5, 0.64356);
    rep.contraction = true;
    rep.stages.push_back({"derivative", true, {{"total", decimal_up(0.64356)}}, 1.0, ""});
    nlohmann::json j = nlohmann::json::parse(rep.to_json().dump());
    Interval nb = interval_from_json(j["norm_bound"]);
    CHECK(nb.lo == rep.norm_bound.lo);
    CHECK(nb.hi == rep.norm_bound.hi);
    CHECK(j["stages"][0]["name"] == "derivative");
    CHECK(j["config"]["nu"] == "0.127");
    Interval inf = interval_from_json(interval_json(Interval(rnd::kInf)));
    CHECK(inf.hi == rnd::kInf);
}
