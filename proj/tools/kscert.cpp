#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "ksc/prover.hpp"
#include "ksc/topology.hpp"

using namespace ksc;
using nlohmann::json;

namespace {

void write_report(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

int run_attract(const RunConfig& cfg) {
    ProofReport rep = certify_attracting_orbit(cfg);
    for (const auto& s : rep.stages) {
        std::printf("%-14s %-5s %8.2fs", s.name.c_str(), s.verdict ? "ok" : "FAIL", s.seconds);
        if (!s.error.empty()) std::printf("  (%s)", s.error.c_str());
        std::printf("\n");
    }
    std::printf("norm bound %s  contraction %s\n", decimal_up(rep.norm_bound.hi).c_str(),
                rep.contraction ? "yes" : "no");
    write_report(cfg.report, rep.to_json());
    bool ok = rep.contraction;
    if (const StageResult* d = rep.stage("double_return")) ok = ok && d->verdict;
    return ok ? 0 : 1;
}

int run_integrate(const RunConfig& cfg, double T) {
    cfg.validate();
    KSField f(from_decimal(cfg.nu), cfg.m, cfg.q);
    C0Options opt;
    opt.tol = cfg.tol;
    opt.order = cfg.order;
    opt.max_steps = cfg.max_steps;
    C0Integrator I(f, opt);

    // seed head on the explicit modes, remaining modes in the tail constant
    Eigen::VectorXd u = default_seed();
    C0State s;
    IVector x(cfg.m, Interval(0.0));
    for (int k = 0; k < cfg.m && k < u.size(); ++k) x[k] = Interval(u(k));
    for (int k = cfg.m; k < u.size(); ++k)
        s.C = std::max(s.C, up_mul(std::fabs(u(k)), pow(Interval(cfg.q), k + 1).hi));
    s.x = Doubleton::box(x);
    s.q = cfg.q;

    auto t0 = std::chrono::steady_clock::now();
    json rep = {{"config", cfg.to_json()}, {"t", T}};
    try {
        C0State r = I.integrate(s, T);
        IVector H = r.x.hull();
        json head = json::array();
        double w = 0.0;
        for (const auto& h : H) {
            head.push_back(interval_json(h));
            w = std::max(w, h.width());
        }
        rep["head"] = head;
        rep["tail"] = decimal_up(r.C);
        rep["verdict"] = true;
        std::printf("t=%.6g  max width %.3g  tail %.3g\n", r.t, w, r.C);
    } catch (const std::exception& e) {
        rep["verdict"] = false;
        rep["error"] = e.what();
        std::printf("integration failed: %s\n", e.what());
    }
    rep["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report(cfg.report, rep);
    return rep["verdict"].get<bool>() ? 0 : 1;
}

int run_cone(const std::string& example) {
    ConeDerivative D;
    QForm Q;
    if (example == "hyperbolic") {
        // f(x, y) = (2x, y/2)
        D.fxx = IMatrix(1, 1, Interval(2.0));
        D.fky = {0.0};
        D.fyy = 0.5;
        Q = QForm::standard(1, 1);
    } else if (example == "swap") {
        // f(x1, x2) = (x2, x1), x1 exit, x2 entry
        D.fxx = IMatrix(2, 2, Interval(0.0));
        D.fxx(0, 1) = D.fxx(1, 0) = Interval(1.0);
        D.fky = {0.0, 0.0};
        Q = QForm::standard(2, 1);
    } else {
        std::fprintf(stderr, "unknown example %s\n", example.c_str());
        return 2;
    }
    ConeConstants c = cone_constants(Q, Q, D);
    std::printf("a=%.17g c=%.17g d=%.17g verdict=%s\n", c.a.lo, c.c.hi, c.d.lo, c.verdict ? "true" : "false");
    return c.verdict ? 0 : 1;
}

// quick property checks, a few seconds
int run_selftest() {
    int failed = 0;
    auto check = [&](bool ok, const char* what) {
        std::printf("%-44s %s\n", what, ok ? "ok" : "FAIL");
        if (!ok) ++failed;
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);

    bool mul = true;
    for (int i = 0; i < 1000; ++i) {
        double a = U(rng), b = U(rng), c = U(rng), d = U(rng);
        Interval x = Interval::hull(a, b), y = Interval::hull(c, d);
        Interval p = x * y;
        mul = mul && p.contains(a * c) && p.contains(b * d) && p.contains(a * d);
    }
    check(mul, "interval product contains samples");

    KSField f(from_decimal("0.127"), 8, 1.5);
    bool eq = true;
    for (int i = 0; i < 20; ++i) {
        IVector h(8);
        for (auto& v : h) v = Interval(0.1 * U(rng));
        GeometricBound u(h, 0.01, 1.5);
        FieldEnclosure a = eval_field(f, apply_symmetry(u)), b = eval_field(f, u);
        for (int k = 0; k < 8; ++k) {
            Interval s = k % 2 == 0 ? -b.head[k] : b.head[k];
            eq = eq && std::fabs(a.head[k].lo - s.lo) <= std::fabs(rnd::succ(s.lo) - s.lo) &&
                 std::fabs(a.head[k].hi - s.hi) <= std::fabs(rnd::succ(s.hi) - s.hi);
        }
    }
    check(eq, "field equivariance under the symmetry");

    HSet N;
    N.center = Eigen::VectorXd::Zero(1);
    N.frame = Eigen::MatrixXd::Identity(1, 1);
    N.radii = Eigen::VectorXd::Ones(1);
    N.u = 1;
    check(check_covering(N, N, affine_image(IMatrix(1, 1, Interval(3.0)), IVector(1, Interval(0.0)), 1)),
          "covering x -> 3x");
    check(!check_covering(N, N, affine_image(IMatrix(1, 1, Interval(0.5)), IVector(1, Interval(0.0)), 1)),
          "no covering x -> x/2");

    IMatrix J(2, 2, Interval(0.0));
    J(0, 0) = Interval(-1.0);
    J(0, 1) = Interval(0.5);
    J(1, 1) = Interval(0.2);
    IMatrix E = expm_upper(J, Interval(0.5));
    check(E(0, 0).hi >= std::exp(-0.5) && E(1, 1).hi >= std::exp(0.1) && E(1, 0).hi == 0.0, "expm upper bound");

    std::printf("%d failed\n", failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Computer-assisted certification for the Kuramoto-Sivashinsky equation"};
    app.set_config("--config", "", "key=value configuration file");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    double T = 1.0;
    std::string example = "hyperbolic";
    app.add_option("--nu", cfg.nu, "viscosity (decimal)");
    app.add_option("--m", cfg.m, "number of explicit modes");
    app.add_option("--q", cfg.q, "geometric decay rate of the tail");
    app.add_option("--tol", cfg.tol, "local error tolerance");
    app.add_option("--order", cfg.order, "Taylor order");
    app.add_option("--t", T, "integration time");
    app.add_option("--report", cfg.report, "JSON report path");
    app.add_option("--max-steps", cfg.max_steps, "step limit per integration");
    app.add_option("--head-inflation", cfg.head_inflation, "inflation of the image on the explicit modes");
    app.add_option("--tail-inflation", cfg.tail_inflation, "inflation of the tail constant");

    auto* attract = app.add_subcommand("attract", "certify the attracting periodic orbit");
    auto* integrate = app.add_subcommand("integrate", "rigorous integration from the seed point");
    auto* cone = app.add_subcommand("cone", "cone condition on a synthetic example");
    cone->add_option("--example", example, "hyperbolic or swap");
    auto* selftest = app.add_subcommand("selftest", "quick property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*attract) return run_attract(cfg);
        if (*integrate) return run_integrate(cfg, T);
        if (*cone) return run_cone(example);
        if (*selftest) return run_selftest();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
