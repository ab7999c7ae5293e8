#include "ksc/topology.hpp"

namespace ksc {

void HSet::validate() const {
    const int n = dim();
    if (frame.rows() != n || frame.cols() != n || radii.size() != n) throw std::invalid_argument("h-set dimension mismatch");
    if (u < 0 || u > n) throw std::invalid_argument("bad exit dimension");
    for (int i = 0; i < n; ++i)
        if (!(radii(i) > 0)) throw std::invalid_argument("h-set radius must be positive");
    if (C < 0 || !(q > 1)) throw std::invalid_argument("bad h-set tail");
    inverse_enclosure(frame);  // throws when singular
}

IVector HSet::to_local(const IVector& x) const {
    IMatrix B = inverse_enclosure(frame);
    IVector y = B * (x - to_ivector(center));
    for (int i = 0; i < dim(); ++i) y[i] = y[i] / Interval(radii(i));
    return y;
}

QForm QForm::standard(int n, int u) {
    QForm Q;
    Q.q = Eigen::VectorXd::Constant(n, -1.0);
    Q.q.head(u).setOnes();
    return Q;
}

int QForm::exits() const { return static_cast<int>((q.array() > 0).count()); }

bool check_covering(const HSet& N, const HSet& M, const CoveringImage& img) {
    if (N.u != M.u) throw std::invalid_argument("exit dimensions differ");
    const int n = M.dim(), u = M.u;
    if (static_cast<int>(img.whole.size()) != n || static_cast<int>(img.lo.size()) != u ||
        static_cast<int>(img.hi.size()) != u)
        throw std::invalid_argument("image dimension mismatch");
    const Interval unit(-1.0, 1.0);
    // entry slab and tail
    for (int j = u; j < n; ++j)
        if (!img.whole[j].interior_of(unit)) return false;
    if (!(img.C < M.C || (img.C == 0 && M.C == 0))) return false;
    // exit faces on opposite sides
    for (int i = 0; i < u; ++i) {
        const Interval& a = img.lo[i][i];
        const Interval& b = img.hi[i][i];
        bool plus = a.hi < -1 && b.lo > 1;
        bool minus = a.lo > 1 && b.hi < -1;
        if (!plus && !minus) return false;
    }
    return true;
}

CoveringImage affine_image(const IMatrix& L, const IVector& b, int u, double C) {
    IVector box(L.cols(), Interval(-1.0, 1.0));
    CoveringImage img;
    img.whole = L * box + b;
    img.C = C;
    for (int i = 0; i < u; ++i) {
        IVector f = box;
        f[i] = Interval(-1.0);
        img.lo.push_back(L * f + b);
        f[i] = Interval(1.0);
        img.hi.push_back(L * f + b);
    }
    return img;
}

namespace {

// interval Cholesky; success implies every symmetric member is positive definite
bool cholesky_ok(IMatrix A) {
    const int n = A.rows();
    for (int k = 0; k < n; ++k) {
        Interval p = A(k, k);
        for (int j = 0; j < k; ++j) p -= sqr(A(k, j));
        if (!(p.lo > 0)) return false;
        A(k, k) = sqrt(p);
        for (int i = k + 1; i < n; ++i) {
            Interval s = A(i, k);
            for (int j = 0; j < k; ++j) s -= A(i, j) * A(k, j);
            A(i, k) = s / A(k, k);
        }
    }
    return true;
}

Eigen::MatrixXd symmetric_mid(const IMatrix& S) {
    Eigen::MatrixXd c = S.mid();
    return 0.5 * (c + c.transpose());
}

}  // namespace

double gershgorin_lower(const IMatrix& S) {
    const int n = S.rows();
    double best = rnd::kInf;
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) r = up_add(r, std::max(S(i, j).mag(), S(j, i).mag()));
        best = std::min(best, rnd::sub_dn(S(i, i).lo, r));
    }
    return best;
}

bool positive_definite(const IMatrix& S, double a) {
    const int n = S.rows();
    Eigen::MatrixXd c = symmetric_mid(S);
    // |S - c| entrywise, spectral norm bounded by the symmetric row sums
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            double e = std::max(rnd::sub_up(S(i, j).hi, c(i, j)), rnd::sub_up(c(i, j), S(i, j).lo));
            double e2 = std::max(rnd::sub_up(S(j, i).hi, c(i, j)), rnd::sub_up(c(i, j), S(j, i).lo));
            s = up_add(s, std::max(e, e2));
        }
        r = std::max(r, s);
    }
    Interval shift = Interval(r) + Interval(a);
    IMatrix T = IMatrix::from(c);
    for (int i = 0; i < n; ++i) T(i, i) = T(i, i) - Interval(shift.hi);
    return cholesky_ok(T);
}

ConeConstants cone_constants(const QForm& QN, const QForm& QM, const ConeDerivative& D) {
    const int n = D.fxx.rows();
    if (D.fxx.cols() != n || QN.q.size() != n || QM.q.size() != n || static_cast<int>(D.fky.size()) != n)
        throw std::invalid_argument("dimension mismatch");

    // A^T Q_M A - Q_N - |f_yx|^2 I
    IMatrix S(n, n, Interval(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Interval s(0.0);
            for (int k = 0; k < n; ++k) s += Interval(QM.q(k)) * D.fxx(k, i) * D.fxx(k, j);
            S(i, j) = s;
        }
    Interval yx2 = sqr(Interval(D.fyx));
    for (int i = 0; i < n; ++i) S(i, i) = S(i, i) - Interval(QN.q(i)) - yx2;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Interval x;
            if (!intersect(S(i, j), S(j, i), x)) throw std::logic_error("assembled form is not symmetric");
            S(i, j) = S(j, i) = x;
        }

    // largest certified a: eigenvalue guess, then bisection down to the Gershgorin bound
    double lo = n > 0 ? rnd::pred(gershgorin_lower(S)) : 0.0;
    double a = lo;
    if (n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_mid(S));
        double guess = es.eigenvalues().minCoeff();
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        guess -= 1e-14 * scale;
        if (guess > lo && positive_definite(S, guess)) {
            a = guess;
        } else if (guess > lo) {
            double hi = guess;
            while (hi - lo > 1e-6 * std::max(std::fabs(lo), std::fabs(hi))) {
                double mid = 0.5 * (lo + hi);
                (positive_definite(S, mid) ? lo : hi) = mid;
            }
            a = lo;
        }
    }

    ConeConstants r;
    r.a = Interval(a);
    double c = 0.0, y2 = 0.0;
    for (int k = 0; k < n; ++k) {
        double rowx = 0.0;
        for (int j = 0; j < n; ++j) rowx = up_add(rowx, sqr(D.fxx(k, j)).hi);
        rowx = sqrt(Interval(rowx)).hi;
        double w = std::fabs(QM.q(k));
        c = up_add(c, up_mul(w, up_mul(rowx, D.fky[k])));
        y2 = up_add(y2, up_mul(w, up_mul(D.fky[k], D.fky[k])));
    }
    c = up_add(c, up_mul(D.fyx, D.fyy));
    y2 = up_add(y2, up_mul(D.fyy, D.fyy));
    r.c = Interval(c);
    r.d = Interval(rnd::sub_dn(1.0, y2));
    r.verdict = r.a.lo > 0 && r.d.lo > 0 && (r.a * r.d).lo > sqr(r.c).hi;
    return r;
}

}  // namespace ksc
