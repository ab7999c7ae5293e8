#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "ksc/interval.hpp"
#include "ksc/tails.hpp"

using namespace ksc;

namespace {

// exact value of a double as a rational num / 2^1100
boost::multiprecision::cpp_int scaled(double x) {
    int e;
    double f = std::frexp(x, &e);
    auto mant = static_cast<long long>(std::ldexp(f, 53));
    boost::multiprecision::cpp_int v = mant;
    int shift = e - 53 + 1100;
    REQUIRE(shift >= 0);
    return v << shift;
}

}  // namespace

TEST_CASE("endpoint arithmetic on small integers is exact") {
    Interval s = Interval(1, 2) + Interval(3, 4);
    CHECK(s.lo == 4);
    CHECK(s.hi == 6);
    Interval p = Interval(-1, 2) * Interval(3, 4);
    CHECK(p.lo == -4);
    CHECK(p.hi == 8);
}

TEST_CASE("products of sampled members stay inside (exact rationals)") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-3.0, 3.0), P(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        Interval a = Interval::hull(U(rng), U(rng)), b = Interval::hull(U(rng), U(rng));
        double x = a.lo + P(rng) * (a.hi - a.lo), y = b.lo + P(rng) * (b.hi - b.lo);
        x = std::clamp(x, a.lo, a.hi);
        y = std::clamp(y, b.lo, b.hi);
        Interval c = a * b;
        // compare x*y with endpoints at scale 2^2200
        auto xy = scaled(x) * scaled(y);
        auto one = scaled(1.0);
        REQUIRE(scaled(c.lo) * one <= xy);
        REQUIRE(xy <= scaled(c.hi) * one);
    }
}

TEST_CASE("elementary functions") {
    CHECK(exp(Interval(0.0)).contains(1.0));
    CHECK(exp(Interval(1.0)).contains(2.718281828459045));
    Interval r = sqrt(Interval(4, 9));
    CHECK(r.lo == 2);
    CHECK(r.hi == 3);
    Interval p = pow(Interval(1.5), 3);
    CHECK(p.contains(3.375));
    CHECK(pow(Interval(-2, 1), 2).lo == 0);
    CHECK_THROWS(Interval(1) / Interval(-1, 1));
}

TEST_CASE("decimal strings are outward and parse back") {
    Interval nu = from_decimal("0.127");
    CHECK(nu.lo < nu.hi);
    CHECK(nu.lo <= 0.127);
    CHECK(0.127 <= nu.hi);
    for (double x : {0.1, -2.5e-300, 1.0 / 3.0, 6.02214076e23}) {
        CHECK(std::strtod(decimal_down(x).c_str(), nullptr) == x);
        CHECK(std::strtod(decimal_up(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("matrix operations") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    IVector v = {Interval(1, 2), Interval(-3, -1), Interval(0.5)};
    IVector w = IMatrix::identity(3) * v;
    for (int i = 0; i < 3; ++i) {
        CHECK(w[i].lo == v[i].lo);
        CHECK(w[i].hi == v[i].hi);
    }
    IMatrix D(2, 2, Interval(0.0));
    D(0, 0) = Interval(3.0);
    D(1, 1) = Interval(-4.0);
    CHECK(norm_inf(D) == 4.0);
    CHECK(norm_1(D) == 4.0);
    CHECK(norm_2_upper(D) >= 4.0);

    for (int t = 0; t < 50; ++t) {
        IMatrix A(3, 4), B(4, 2);
        Eigen::MatrixXd a(3, 4), b(4, 2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) {
                A(i, j) = Interval::hull(U(rng), U(rng));
                a(i, j) = A(i, j).mid();
            }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 2; ++j) {
                B(i, j) = Interval::hull(U(rng), U(rng));
                b(i, j) = B(i, j).lo;
            }
        IMatrix C = A * B;
        Eigen::MatrixXd c = a * b;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) CHECK(C(i, j).contains(c(i, j)));
        IMatrix At = A.transpose();
        CHECK(At(3, 1).lo == A(1, 3).lo);
    }
}

TEST_CASE("inverse enclosure") {
    Eigen::MatrixXd A(3, 3);
    A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    IMatrix B = inverse_enclosure(A);
    Eigen::MatrixXd X = A.inverse();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(B(i, j).contains(X(i, j)));
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
    P(0, 2) = 1;
    P(1, 0) = -1;
    P(2, 1) = 1;
    IMatrix Q = inverse_enclosure(P);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(Q(i, j).is_point());
            CHECK(Q(i, j).lo == P(j, i));
        }
}

TEST_CASE("geometric bound containment") {
    GeometricBound w(IVector(4, Interval(-0.5, 0.5)), 1.0, 2.0);
    CHECK(contains(w, w));
    GeometricBound small(IVector(3, Interval(-1, 1)), 0.0, 1.5);
    GeometricBound big(IVector(3, Interval(-2, 2)), 1.0, 1.5);
    CHECK(contains(big, small));
    CHECK_FALSE(contains(small, big));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        IVector h(6), g(6);
        for (int k = 0; k < 6; ++k) {
            double c = U(rng) - 0.5, r = U(rng);
            h[k] = Interval(c - r, c + r);
            double s = U(rng) * r;
            g[k] = Interval(c - s, c + s);
        }
        double C = U(rng);
        CHECK(contains(GeometricBound(h, C, 1.5), GeometricBound(g, C * U(rng), 1.5)));
    }
}

TEST_CASE("geometric bound envelope operations") {
    GeometricBound a(IVector{Interval(1, 2), Interval(-1, 0)}, 0.5, 2.0);
    GeometricBound s = a + GeometricBound::zero(2, 2.0);
    CHECK(s.C == a.C);
    CHECK(s.head[0].lo == 1);
    GeometricBound t = Interval(2.0) * GeometricBound(IVector(1, Interval(0.0)), 1.0, 2.0);
    CHECK(t.C == 2.0);
    CHECK(t.q == 2.0);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    GeometricBound b(IVector{Interval(-0.1, 0.3), Interval(2, 3)}, 0.25, 2.0);
    GeometricBound sum = a + b;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(30), y(30), z(30);
        for (int k = 1; k <= 30; ++k) {
            x[k - 1] = k <= 2 ? a.head[k - 1].mid() + 0.49 * a.head[k - 1].width() * U(rng) : a.C * std::pow(2.0, -k) * U(rng);
            y[k - 1] = k <= 2 ? b.head[k - 1].mid() + 0.49 * b.head[k - 1].width() * U(rng) : b.C * std::pow(2.0, -k) * U(rng);
            z[k - 1] = x[k - 1] + y[k - 1];
        }
        REQUIRE(a.member(x));
        REQUIRE(b.member(y));
        CHECK(sum.member(z));
    }
}

TEST_CASE("geometric reduction of polynomial tails") {
    PolyGeometricBound c{{1.0}, 2.0};
    GeometricTail r = geometric_reduce(c, 1.5);
    CHECK(r.C >= 1.0 / 1.5);
    CHECK(r.q == doctest::Approx(2.0 / 1.5));

    PolyGeometricBound k{{0.0, 1.0}, 2.0};
    r = geometric_reduce(k, 1.5);
    CHECK(r.C >= 8.0 / 9.0);
    CHECK(r.C <= 8.0 / 9.0 * (1 + 1e-12));

    PolyGeometricBound quartic{{0.3, 2.0, 1.0, 4.0, 0.127}, 1.5};
    double brute = 0;
    for (int i = 1; i <= 200; ++i) brute = std::max(brute, quartic.eval_up(i) * std::pow(1.2, -i));
    r = geometric_reduce(quartic, 1.2);
    CHECK(r.C >= brute);
    CHECK(r.C <= brute * (1 + 1e-12));
    CHECK_THROWS(geometric_reduce(quartic, 1.6));
}
