#include "doctest.h"

#include "ksc/topology.hpp"

using namespace ksc;

namespace {

HSet unit(int n, int u) {
    HSet N;
    N.center = Eigen::VectorXd::Zero(n);
    N.frame = Eigen::MatrixXd::Identity(n, n);
    N.radii = Eigen::VectorXd::Ones(n);
    N.u = u;
    return N;
}

}  // namespace

TEST_CASE("one dimensional coverings") {
    HSet N = unit(1, 1);
    IVector b(1, Interval(0.0));
    CHECK(check_covering(N, N, affine_image(IMatrix(1, 1, Interval(3.0)), b, 1)));
    CHECK(check_covering(N, N, affine_image(IMatrix(1, 1, Interval(-3.0)), b, 1)));
    CHECK_FALSE(check_covering(N, N, affine_image(IMatrix(1, 1, Interval(0.5)), b, 1)));
    // shifted so one face lands inside
    CHECK_FALSE(check_covering(N, N, affine_image(IMatrix(1, 1, Interval(3.0)), IVector(1, Interval(2.5)), 1)));
}

TEST_CASE("coverings with an entry direction and a tail") {
    HSet N = unit(2, 1);
    N.C = 1.0;
    IMatrix L(2, 2, Interval(0.0));
    L(0, 0) = Interval(3.0);
    L(1, 1) = Interval(0.5);
    IVector b(2, Interval(0.0));
    CHECK(check_covering(N, N, affine_image(L, b, 1, 0.5)));
    CHECK_FALSE(check_covering(N, N, affine_image(L, b, 1, 1.0)));
    L(1, 0) = Interval(0.6);
    CHECK_FALSE(check_covering(N, N, affine_image(L, b, 1, 0.5)));
    // interval slack
    L(1, 0) = Interval(-0.1, 0.1);
    L(0, 0) = Interval(2.9, 3.1);
    CHECK(check_covering(N, N, affine_image(L, b, 1, 0.5)));
    CHECK_THROWS(check_covering(N, unit(2, 2), affine_image(L, b, 1)));
}

TEST_CASE("local coordinates") {
    HSet N = unit(2, 1);
    N.center << 1, 2;
    N.radii << 0.5, 4;
    IVector x = N.to_local(IVector{Interval(1.5), Interval(0.0)});
    CHECK(x[0].contains(1.0));
    CHECK(x[1].contains(-0.5));
}

TEST_CASE("cone constants for a hyperbolic map") {
    ConeDerivative D;
    D.fxx = IMatrix(1, 1, Interval(2.0));
    D.fky = {0.0};
    D.fyy = 0.5;
    QForm Q = QForm::standard(1, 1);
    CHECK(Q.exits() == 1);
    ConeConstants c = cone_constants(Q, Q, D);
    CHECK(c.a.lo == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(c.a.hi <= 3.0);
    CHECK(c.c.mag() <= 1e-12);
    CHECK(c.d.lo == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(c.verdict);
}

TEST_CASE("cone condition fails for a swap") {
    ConeDerivative D;
    D.fxx = IMatrix(2, 2, Interval(0.0));
    D.fxx(0, 1) = D.fxx(1, 0) = Interval(1.0);
    D.fky = {0.0, 0.0};
    QForm Q = QForm::standard(2, 1);
    ConeConstants c = cone_constants(Q, Q, D);
    CHECK_FALSE(c.verdict);
    CHECK(c.a.hi < 0);
}

TEST_CASE("positive definiteness") {
    IMatrix S = IMatrix::identity(3);
    S(0, 1) = S(1, 0) = Interval(0.4, 0.5);
    CHECK(positive_definite(S));
    CHECK(positive_definite(S, 0.4));
    CHECK_FALSE(positive_definite(S, 0.6));
    double g = gershgorin_lower(S);
    CHECK(g <= 0.5);
    CHECK(g >= 0.5 - 1e-15);
    S(0, 1) = S(1, 0) = Interval(0.9, 1.1);
    CHECK_FALSE(positive_definite(S));
}
