#include "doctest.h"

#include <random>

#include "ksc/oracle.hpp"
#include "ksc/poincare.hpp"
#include "ksc/prover.hpp"

using namespace ksc;

namespace {

const Interval nu = from_decimal("0.127");

C0State point_state(const Eigen::VectorXd& u, int m) {
    IVector x(m, Interval(0.0));
    for (int k = 0; k < m && k < u.size(); ++k) x[k] = Interval(u(k));
    C0State s;
    s.x = Doubleton::box(x);
    return s;
}

bool all_zero(const IVector& v) {
    for (const auto& x : v)
        if (x.lo != 0 || x.hi != 0) return false;
    return true;
}

}  // namespace

TEST_CASE("equilibrium stays exactly zero") {
    const int m = 8;
    KSField f(nu, m, 1.5);
    C0Integrator I(f, C0Options{});
    C0State s = point_state(Eigen::VectorXd::Zero(m), m);
    EnclosureResult e = I.rough_enclosure(s, 0.01);
    CHECK(e.h > 0);
    CHECK(all_zero(e.E.head));
    CHECK(e.E.C == 0);
    C0State r = I.step(s, e);
    CHECK(all_zero(r.x.hull()));
    r = I.integrate(s, 1.0);
    CHECK(r.t == 1.0);
    CHECK(all_zero(r.x.hull()));
    CHECK(r.C == 0);
    C0State same = I.integrate(s, 0.0);
    CHECK(same.t == 0.0);
}

TEST_CASE("rough enclosure near the orbit contains sampled solutions") {
    const int m = 10;
    KSField f(nu, m, 1.5);
    C0Integrator I(f, C0Options{});
    Eigen::VectorXd u = default_seed().head(m);
    IVector x(m);
    for (int k = 0; k < m; ++k) x[k] = Interval(u(k)) + Interval::sym(1e-8);
    C0State s;
    s.x = Doubleton::box(x);
    EnclosureResult e = I.rough_enclosure(s, 0.01);
    REQUIRE(e.h > 0);

    oracle::Galerkin g{0.127, 2 * m};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1e-8, 1e-8);
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd a = g.pad(u);
        for (int k = 0; k < m; ++k) a(k) += U(rng);
        std::vector<double> times;
        for (int j = 1; j <= 5; ++j) times.push_back(e.h * j / 5);
        for (const auto& y : oracle::galerkin_trajectory(g, a, times, 1e-12)) {
            std::vector<double> v(y.data(), y.data() + y.size());
            CHECK(e.E.member(v));
        }
    }
}

TEST_CASE("one step from a single mode") {
    const int m = 8;
    KSField f(nu, m, 1.5);
    C0Integrator I(f, C0Options{});
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    u(0) = 0.01;
    C0State s = point_state(u, m);
    EnclosureResult e = I.rough_enclosure(s, 1e-3);
    C0State r = I.step(s, e);
    oracle::Galerkin g{0.127, 40};
    Eigen::VectorXd y = oracle::galerkin_solve(g, g.pad(u), r.t, 1e-12);
    IVector H = r.x.hull();
    for (int k = 0; k < m; ++k) CHECK(H[k].contains(y(k)));
    CHECK(std::fabs(H[0].mid() - std::exp(0.873 * r.t) * 0.01) < 1e-4 * r.t);
}

TEST_CASE("integration from points near the orbit contains the reference") {
    const int m = 12;
    KSField f(nu, m, 1.5);
    C0Integrator I(f, C0Options{});
    oracle::Galerkin g{0.127, 2 * m + 10};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1e-6, 1e-6);
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd u = default_seed().head(m);
        for (int k = 0; k < m; ++k) u(k) += U(rng);
        C0State r = I.integrate(point_state(u, m), 0.2);
        Eigen::VectorXd y = oracle::galerkin_solve(g, g.pad(u), 0.2, 1e-12, 1e-24);
        GeometricBound E = r.set();
        std::vector<double> v(y.data(), y.data() + y.size());
        CHECK(E.member(v));
    }
}

TEST_CASE("variational flow at the equilibrium") {
    const int m = 8;
    KSField f(nu, m, 1.5);
    C0Integrator I0(f, C0Options{});
    C1Integrator I1(I0);
    C0State s = point_state(Eigen::VectorXd::Zero(m), m);

    auto [s0, V0] = I1.integrate(s, C1Frame::identity(m), 0.0);
    IMatrix H0 = V0.Vxx.hull();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) CHECK(H0(i, j).contains(i == j ? 1.0 : 0.0));

    auto [s1, V] = I1.integrate(s, C1Frame::identity(m), 1.0);
    IMatrix H = V.Vxx.hull();
    CHECK(H(0, 0).contains(std::exp(0.873)));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j)
            if (i != j) CHECK(H(i, j).contains_zero());
        CHECK(V.C[i] == 0);
        CHECK(V.z[i] == 0);
    }
    CHECK(V.z[m] > 0);
    CHECK(V.z[m] <= 1.0);
}

TEST_CASE("variational flow continues from an intermediate time") {
    const int m = 8;
    KSField f(nu, m, 1.5);
    C0Integrator I0(f, C0Options{});
    C1Integrator I1(I0);
    Eigen::VectorXd u = default_seed().head(m);
    C0State s = point_state(u, m);
    auto [a, Va] = I1.integrate(s, C1Frame::identity(m), 0.05);
    auto [b, Vb] = I1.integrate(a, Va, 0.1);
    auto [c, Vc] = I1.integrate(s, C1Frame::identity(m), 0.1);
    IMatrix Hb = Vb.Vxx.hull(), Hc = Vc.Vxx.hull();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Interval x;
            CHECK(intersect(Hb(i, j), Hc(i, j), x));
        }
}

TEST_CASE("return time derivative for an orthogonal crossing") {
    const int m = 4;
    Section sec = Section::coordinate(m, 0, 1);
    IVector F(m, Interval(0.0));
    F[0] = Interval(1.0);
    std::vector<double> z(m + 1, 0.0);
    ReturnTimeDerivative r = return_time_derivative(sec, IMatrix::identity(m), z, F);
    CHECK(r.g.lo == 1);
    CHECK(r.g.hi == 1);
    CHECK(r.dT[0].lo == -1);
    for (int j = 1; j < m; ++j) CHECK(r.dT[j].mag() == 0);
    CHECK(r.tail == 0);

    IMatrix V(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) V(i, j) = Interval(0.1 * (i + 1) - 0.05 * j);
    r = return_time_derivative(sec, V, z, F);
    for (int j = 0; j < m; ++j) CHECK(r.dT[j].contains(-V(0, j).mid()));

    // DP_kj = V_kj - f_k V_1j
    IVector Fk = {Interval(1.0), Interval(0.5), Interval(-2.0), Interval(0.0)};
    CrossingC1 dv;
    dv.Vxx = V;
    dv.C.assign(m, 0.0);
    dv.z = z;
    DPBlocks P = poincare_derivative_blocks(sec, dv, Fk, Interval(1.0), 1.5);
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) CHECK(P.Pxx(k, j).contains(V(k, j).mid() - Fk[k].mid() * V(0, j).mid()));
    CHECK(P.Pyy == 0);
    CHECK(P.Pyx() == 0);

    FrameNorms N = change_frame(P, Eigen::MatrixXd::Identity(m, m));
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) CHECK(N.Mxx(k, j).subset_of(P.Pxx(k, j)));
    CHECK(N.yy == P.Pyy);
}

TEST_CASE("no crossing from the equilibrium") {
    const int m = 6;
    KSField f(nu, m, 1.5);
    C0Integrator I(f, C0Options{});
    Section sec = Section::coordinate(m, 0, 1);
    sec.c = -0.5;
    CHECK_THROWS(cross_section(I, point_state(Eigen::VectorXd::Zero(m), m), sec, 0.2));
}

TEST_CASE("section crossing near the orbit contains the reference return") {
    RunConfig cfg;
    cfg.m = 12;
    Candidate c = find_candidate(cfg, default_seed());
    KSField f(nu, cfg.m, cfg.q);
    C0Options opt;
    opt.tol = cfg.tol;
    C0Integrator I(f, opt);
    Section sec = Section::coordinate(cfg.m, 0, c.orientation);
    C0State s = point_state(c.u, cfg.m);
    Crossing cr = cross_section(I, s, sec, 3.0);
    CHECK(cr.T.lo > 0);
    oracle::Galerkin g{0.127, 2 * cfg.m + 10};
    oracle::ReturnPoint rp = oracle::first_return(g, g.pad(c.u), 0, c.orientation, 3.0, 1e-12);
    CHECK(cr.T.contains(rp.t));
    IVector h = cr.section_hull(sec);
    int l = 0;
    for (int k = 1; k < cfg.m; ++k) CHECK(h[l++].contains(rp.u(k)));
}
