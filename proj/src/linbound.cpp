#include "ksc/linbound.hpp"

namespace ksc {

bool is_metzler(const IMatrix& J) {
    if (J.rows() != J.cols()) return false;
    for (int i = 0; i < J.rows(); ++i)
        for (int j = 0; j < J.cols(); ++j) {
            if (!J(i, j).finite()) return false;
            if (i != j && J(i, j).lo < 0) return false;
        }
    return true;
}

Interval log_norm_max(const IMatrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("dimension mismatch");
    Interval best;
    for (int i = 0; i < A.rows(); ++i) {
        Interval s = A(i, i);
        for (int k = 0; k < A.cols(); ++k)
            if (k != i) s += abs(A(i, k));
        best = i == 0 ? s : Interval(std::max(best.lo, s.lo), std::max(best.hi, s.hi));
    }
    return best;
}

namespace {

// upper bound of the product of two nonnegative matrices
Eigen::MatrixXd mul_nonneg_up(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const int n = static_cast<int>(A.cols());
    const double nu = up_mul(static_cast<double>(n), 0x1p-53);
    const double f = up_div(1.0, rnd::sub_dn(1.0, nu));
    const double eta = up_mul(n + 1.0, std::numeric_limits<double>::denorm_min());
    Eigen::MatrixXd P = A * B;
    // structural zeros are exact
    Eigen::MatrixXd pat = (A.array() != 0).cast<double>().matrix() * (B.array() != 0).cast<double>().matrix();
    for (int i = 0; i < P.rows(); ++i)
        for (int j = 0; j < P.cols(); ++j)
            if (pat(i, j) != 0) P(i, j) = up_add(up_mul(P(i, j), f), eta);
    return P;
}

// entrywise upper bound of e^{N t} for N >= 0, t >= 0
Eigen::MatrixXd expm_nonneg(const Eigen::MatrixXd& N, double t, int order) {
    const int n = static_cast<int>(N.rows());
    Eigen::MatrixXd M(n, n);
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            M(i, j) = up_mul(N(i, j), t);
            row = up_add(row, M(i, j));
        }
        nrm = std::max(nrm, row);
    }
    if (!std::isfinite(nrm)) throw std::domain_error("split the time step");
    int s = 0;
    while (nrm > 0.5) {
        if (++s > 1000) throw std::domain_error("split the time step");
        nrm = up_mul(nrm, 0.5);
        M *= 0.5;  // exact
    }
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
    for (int k = order; k >= 1; --k) {
        S = mul_nonneg_up(M, S);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) S(i, j) = up_add(up_div(S(i, j), k), i == j ? 1.0 : 0.0);
    }
    // nonnegative terms: the tail of the series is bounded entrywise by its norm,
    // nrm^{p+1}/(p+1)! / (1 - nrm/(p+2))
    double r = 1.0;
    for (int k = 1; k <= order + 1; ++k) r = up_div(up_mul(r, nrm), k);
    r = up_div(r, rnd::sub_dn(1.0, up_div(nrm, order + 2.0)));
    // only where some power of N can be nonzero
    Eigen::MatrixXd reach = Eigen::MatrixXd::Identity(n, n) + (N.array() != 0).cast<double>().matrix();
    for (int it = 1; it < n; it *= 2) reach = ((reach * reach).array() != 0).cast<double>().matrix();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (reach(i, j) != 0) S(i, j) = up_add(S(i, j), r);
    for (int i = 0; i < s; ++i) S = mul_nonneg_up(S, S);
    return S;
}

// e^{Jt} for point Metzler J and point t >= 0, as [0, upper]
IMatrix expm_point(const Eigen::MatrixXd& J, double t, int order) {
    const int n = static_cast<int>(J.rows());
    if (t == 0.0) return IMatrix::identity(n);
    // e^{Jt} = e^{-sigma t} e^{(J + sigma I) t}
    double sigma = 0.0;
    for (int i = 0; i < n; ++i) sigma = std::max(sigma, -J(i, i));
    Eigen::MatrixXd N = J;
    for (int i = 0; i < n; ++i) N(i, i) = std::max(0.0, rnd::add_up(J(i, i), sigma));
    Eigen::MatrixXd S = expm_nonneg(N, t, order);
    double f = exp_point(-rnd::mul_dn(sigma, t)).hi;
    IMatrix E(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) E(i, j) = Interval(0.0, up_mul(S(i, j), f));
    return E;
}

}  // namespace

IMatrix expm_upper(const JMatrix& J, const Interval& t, int order) {
    if (!(t.lo >= 0)) throw std::invalid_argument("negative time");
    if (!t.finite()) throw std::invalid_argument("unbounded time");
    if (!is_metzler(J)) throw std::invalid_argument("matrix is not Metzler");
    Eigen::MatrixXd Jp = J.upper();
    IMatrix E = expm_point(Jp, t.hi, order);
    if (t.is_point()) return E;
    // e^{Js} = e^{-sigma s} e^{(J + sigma I)s} <= e^{sigma (b - a)} e^{Jb} for s in [a, b]
    double sigma = 0.0;
    for (int i = 0; i < Jp.rows(); ++i) sigma = std::max(sigma, -Jp(i, i));
    double f = exp_point(up_mul(sigma, rnd::sub_up(t.hi, t.lo))).hi;
    for (int i = 0; i < E.rows(); ++i)
        for (int j = 0; j < E.cols(); ++j) E(i, j) = Interval(0.0, up_mul(E(i, j).hi, f));
    return E;
}

double defect_bound(double l, double delta, double d0, double t) {
    if (l == 0.0) return up_add(d0, up_mul(delta, t));
    Interval e = exp(Interval(l) * Interval(t));
    Interval v = e * Interval(d0) + Interval(delta) * (e - Interval(1.0)) / Interval(l);
    return v.hi;
}

std::vector<double> apply_upper(const IMatrix& G, const std::vector<double>& z) {
    if (G.cols() != static_cast<int>(z.size())) throw std::invalid_argument("dimension mismatch");
    std::vector<double> r(G.rows(), 0.0);
    for (int i = 0; i < G.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < G.cols(); ++j) {
            if (z[j] < 0) throw std::invalid_argument("negative norm bound");
            s = up_add(s, up_mul(std::max(0.0, G(i, j).hi), z[j]));
        }
        r[i] = s;
    }
    return r;
}

std::vector<double> propagate_norm_vector(const JMatrix& J, const Interval& t, const std::vector<double>& z) {
    return apply_upper(expm_upper(J, t), z);
}

}  // namespace ksc
