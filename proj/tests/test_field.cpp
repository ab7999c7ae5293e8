#include "doctest.h"

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ksc/ksfield.hpp"
#include "ksc/linbound.hpp"
#include "ksc/oracle.hpp"

using namespace ksc;

namespace {

const Interval nu = from_decimal("0.127");

// member of the set with explicit modes drawn from the head and |a_k| <= C q^-k beyond
Eigen::VectorXd sample(const GeometricBound& u, int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Eigen::VectorXd a(n);
    for (int k = 1; k <= n; ++k) {
        Interval h = u.mode(k);
        a(k - 1) = std::clamp(h.lo + U(rng) * (h.hi - h.lo), h.lo, h.hi);
    }
    return a;
}

}  // namespace

TEST_CASE("field at simple points") {
    KSField f(nu, 8, 1.5);
    FieldEnclosure z = eval_field(f, GeometricBound::zero(8, 1.5));
    for (const auto& x : z.head) {
        CHECK(x.lo == 0);
        CHECK(x.hi == 0);
    }
    CHECK(z.reduced.C == 0);

    IVector h(8, Interval(0.0));
    h[0] = Interval(0.1);
    FieldEnclosure e = eval_field(f, GeometricBound(h, 0.0, 1.5));
    CHECK(e.head[0].contains(0.0873));
    CHECK(e.head[0].width() < 1e-15);
    CHECK(e.head[1].contains(-0.02));
    CHECK(e.head[1].width() < 1e-15);
    for (int k = 2; k < 8; ++k) CHECK(e.head[k].mag() < 1e-300);
}

TEST_CASE("field enclosure contains truncated direct sums") {
    const int m = 10, N = 500;
    const double q = 1.5;
    KSField f(nu, m, q);
    IVector h(m);
    for (int k = 1; k <= m; ++k) h[k - 1] = Interval::sym(std::pow(q, -k));
    GeometricBound W(h, 1.0, q);
    FieldEnclosure e = eval_field(f, W);
    oracle::Galerkin g{0.127, N};
    std::mt19937_64 rng(1);
    for (int s = 0; s < 20; ++s) {
        Eigen::VectorXd a = sample(W, N, rng);
        Eigen::VectorXd F = g.field(a);
        for (int k = 1; k <= 50; ++k) {
            if (k <= m)
                CHECK(e.head[k - 1].contains(F(k - 1)));
            else
                CHECK(std::fabs(F(k - 1)) <= e.tail.eval_up(k) * qneg(q, k).hi * (1 + 1e-12));
        }
    }
}

TEST_CASE("partial derivatives") {
    KSField f(nu, 8, 1.5);
    IVector h(8, Interval(0.0));
    h[0] = Interval(1.0);
    CHECK(partial_derivative(f, 1, 2, GeometricBound(h, 0.0, 1.5)).contains(2.0));
    CHECK(partial_derivative(f, 1, 1, GeometricBound::zero(8, 1.5)).contains(0.873));

    const int m = 12;
    KSField f12(nu, m, 1.5);
    oracle::Galerkin g{0.127, 60};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(60);
        for (int k = 1; k <= m; ++k) a(k - 1) = U(rng) * std::pow(1.5, -k);
        GeometricBound z = GeometricBound::point(a.head(m), 1.5);
        oracle::Map F = [&](const Eigen::VectorXd& x) { return g.field(x); };
        Eigen::MatrixXd FD = oracle::finite_diff_jacobian(F, a, 1e-5);
        for (int i = 1; i <= m; ++i)
            for (int k = 1; k <= m; ++k) {
                Interval d = partial_derivative(f12, i, k, z);
                // two-term formula in extended precision, exact for these magnitudes
                long double w = i > k ? -static_cast<long double>(a(i - k - 1)) : i < k ? a(k - i - 1) : 0.0L;
                long double ex = 2.0L * i * (w + a(i + k - 1));
                if (i == k) ex += f12.lambda(i).mid();
                if (i != k) CHECK((d.lo <= ex && ex <= d.hi));
                CHECK(std::fabs(d.mid() - FD(i - 1, k - 1)) < 1e-7);
            }
    }
}

TEST_CASE("derivative block norms dominate sampled Jacobians") {
    const int m = 8, n = 40;
    KSField f(nu, m, 1.5);
    BlockNorms z = derivative_block_norms(f, GeometricBound::zero(m, 1.5));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j)
            if (i != j) CHECK(z.Axx(i, j).mag() == 0);
        CHECK(z.row_y[i] == 0);
        CHECK(z.col_y[i] == 0);
    }

    IVector h(m);
    for (int k = 1; k <= m; ++k) h[k - 1] = Interval(0.3, 0.5) * qneg(1.5, k);
    GeometricBound E(h, 0.2, 1.5);
    BlockNorms b = derivative_block_norms(f, E);
    oracle::Galerkin g{0.127, n};
    std::mt19937_64 rng(3);
    for (int s = 0; s < 50; ++s) {
        Eigen::MatrixXd A = g.jacobian(sample(E, n, rng));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) CHECK(b.Axx(i, j).contains(A(i, j)));
            CHECK(A.row(i).tail(n - m).cwiseAbs().sum() <= b.row_y[i]);
            CHECK(A.col(i).tail(n - m).cwiseAbs().maxCoeff() <= b.col_y[i]);
        }
    }
}

TEST_CASE("comparison matrix at the equilibrium") {
    const int m = 8;
    KSField f(nu, m, 1.5);
    JMatrix J = build_J(f, GeometricBound::zero(m, 1.5));
    CHECK(is_metzler(J));
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j)
            if (i != j) CHECK(J(i, j).mag() == 0);
    // upper bounds
    for (int i = 0; i < m; ++i) {
        CHECK(J(i, i).hi >= f.lambda(i + 1).hi);
        CHECK(J(i, i).hi <= f.lambda(i + 1).hi + 1e-12);
    }
    CHECK(J(m, m).hi >= f.lambda(m + 1).hi);
    CHECK(f.lambda(1).lo >= 0.873 - 1e-15);
    CHECK(f.lambda(3).contains(-1.287));
}

TEST_CASE("isolation and logarithmic norm constants") {
    KSField f(nu, 8, 1.5);
    IsolationConstants c = isolation_and_lognorm_constants(f, 0.0, 0.0);
    CHECK(c.K == 3);
    CHECK(c.l == doctest::Approx(1.968).epsilon(1e-14));
    CHECK(c.l >= 1.968);

    // enumeration of the bound for S = 1
    const double q = 1.5, S = 1.0;
    int K = 1;
    for (int k = 1; k < 1000; ++k) {
        double kk = k;
        if (kk * kk * (1 - 0.127 * kk * kk) + kk * (kk - 1) * S + 2 * kk * S / (q * q - 1) >= 0) K = k + 1;
    }
    CHECK(isolation_and_lognorm_constants(f, S, S).K == K);
    CHECK_THROWS(isolation_and_lognorm_constants(f, -1.0, 0.0));
}

TEST_CASE("symmetry is an involution") {
    IVector h = {Interval(0.1, 0.2), Interval(-1, 2), Interval(3), Interval(-0.5, -0.25)};
    GeometricBound u(h, 0.125, 1.5);
    GeometricBound s = apply_symmetry(u), ss = apply_symmetry(s);
    CHECK(s.head[0].lo == -0.2);
    CHECK(s.head[1].lo == -1);
    for (int k = 0; k < 4; ++k) {
        CHECK(ss.head[k].lo == h[k].lo);
        CHECK(ss.head[k].hi == h[k].hi);
    }
    CHECK(ss.C == u.C);
    GeometricBound z = apply_symmetry(GeometricBound::zero(4, 1.5));
    for (const auto& x : z.head) CHECK(x.mag() == 0);
}

TEST_CASE("logarithmic norm") {
    CHECK(log_norm_max(IMatrix::identity(2)).hi == 1);
    CHECK(log_norm_max(IMatrix(2, 2, Interval(0.0))).hi == 0);
    IMatrix A(2, 2);
    A(0, 0) = Interval(-5);
    A(0, 1) = Interval(1);
    A(1, 0) = Interval(2);
    A(1, 1) = Interval(-3);
    CHECK(log_norm_max(A).hi == -1);
}

TEST_CASE("exponential upper bounds") {
    IMatrix E = expm_upper(IMatrix(1, 1, Interval(-1.0)), Interval(1.0));
    CHECK(E(0, 0).hi >= 0.36787944117144233);
    CHECK(E(0, 0).hi <= 0.36787944117144233 * (1 + 1e-14));

    IMatrix N(2, 2, Interval(0.0));
    N(0, 1) = Interval(1.0);
    E = expm_upper(N, Interval(2.0));
    CHECK(E(0, 0).hi >= 1);
    CHECK(E(0, 1).hi >= 2);
    CHECK(E(1, 1).hi >= 1);
    CHECK(E(1, 0).hi == 0);
    CHECK(E(0, 1).hi <= 2 * (1 + 1e-14));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Eigen::MatrixXd J(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) J(i, j) = i == j ? 5 * U(rng) : std::fabs(U(rng));
        IMatrix G = expm_upper(IMatrix::from(J), Interval(0.1));
        Eigen::MatrixXd X = (0.1 * J).exp();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(X(i, j) <= G(i, j).hi * (1 + 1e-14));
    }
}

TEST_CASE("defect bound") {
    CHECK(defect_bound(-1, 0, 1, 1) >= 0.36787944117144233);
    CHECK(defect_bound(-1, 0, 1, 1) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    CHECK(defect_bound(0, 0.5, 0, 2) >= 1.0);
    CHECK(defect_bound(0, 0.5, 0, 2) == doctest::Approx(1.0).epsilon(1e-14));

    // y' = l y + delta s with |s| <= 1 against phi' = l phi
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double l = 3 * U(rng), delta = P(rng), d0 = P(rng), t = 2 * P(rng), s = U(rng), sgn = U(rng) < 0 ? -1 : 1;
        double e = std::exp(l * t);
        double diff = std::fabs(e * sgn * d0 + delta * s * (l == 0 ? t : (e - 1) / l));
        CHECK(diff <= defect_bound(l, delta, d0, t) * (1 + 1e-14));
    }
}

TEST_CASE("norm vector propagation") {
    IMatrix J(2, 2, Interval(0.0));
    J(0, 0) = Interval(-1.0);
    J(1, 1) = Interval(-2.0);
    std::vector<double> z = propagate_norm_vector(J, Interval(1.0), {0.0, 0.0});
    CHECK(z[0] == 0);
    CHECK(z[1] == 0);
    z = propagate_norm_vector(J, Interval(1.0), {1.0, 1.0});
    CHECK(z[0] >= std::exp(-1.0));
    CHECK(z[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(z[1] >= std::exp(-2.0));
    CHECK(z[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}
