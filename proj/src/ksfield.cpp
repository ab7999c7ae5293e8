#include "ksc/ksfield.hpp"

namespace ksc {

KSField::KSField(const Interval& nu_, int m_, double q_) : nu(nu_), m(m_), q(q_) {
    if (!(nu.lo > 0)) throw std::invalid_argument("nu must be positive");
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (!(q > 1)) throw std::invalid_argument("q must exceed 1");
    dec = Decay(q, 8 * m + 64);
    for (int i = 1; i < 8; ++i) delta_grid.push_back(std::pow(q, i / 8.0));
}

Interval KSField::lambda(int k) const {
    Interval kk = Interval(static_cast<double>(k)) * Interval(static_cast<double>(k));
    return kk * (Interval(1.0) - nu * kk);
}

double QuadBound::mag(int k, const Decay& d) const {
    if (k <= 2 * m) return up_add(val[k - 1].mag(), slack[k - 1]);
    double kk = k;
    return up_mul(up_add(up_mul(c1, kk), up_mul(c2, up_mul(kk, kk))), d.up(k));
}

QuadBound bilinear(const KSField& f, const GeometricBound& a, const GeometricBound& b) {
    const int m = f.m;
    if (a.m() != m || b.m() != m) throw std::invalid_argument("dimension mismatch");
    if (a.q != f.q || b.q != f.q) throw std::invalid_argument("mismatched decay ratios");
    const Decay& d = f.dec;
    const double A = a.C, B = b.C;
    std::vector<double> am(m + 1), bm(m + 1);
    for (int n = 1; n <= m; ++n) {
        am[n] = a.head[n - 1].mag();
        bm[n] = b.head[n - 1].mag();
    }
    // sum_{n>m} q^{-2n} = q^{-2(m+1)}/(1 - q^{-2})
    double g2 = (d(2 * (m + 1)) / (Interval(1.0) - d(2))).hi;
    double AB = up_mul(A, B);

    QuadBound r;
    r.m = m;
    r.val.assign(2 * m, Interval(0.0));
    r.slack.assign(2 * m, 0.0);
    for (int k = 1; k <= 2 * m; ++k) {
        Interval t1(0.0), t2(0.0);
        double s = 0.0;
        for (int n = 1; n < k; ++n) {
            int j = k - n;
            if (n <= m && j <= m)
                t1 += a.head[n - 1] * b.head[j - 1];
            else if (n > m)
                s = up_add(s, up_mul(up_mul(A, d.up(n)), bm[j]));
            else
                s = up_add(s, up_mul(am[n], up_mul(B, d.up(j))));
        }
        for (int n = 1; n <= m; ++n) {
            int j = n + k;
            if (j <= m)
                t2 += a.head[n - 1] * b.head[j - 1] + b.head[n - 1] * a.head[j - 1];
            else
                s = up_add(s, up_mul(up_add(up_mul(am[n], B), up_mul(bm[n], A)), d.up(j)));
        }
        if (AB > 0) s = up_add(s, up_mul(up_mul(2.0 * AB, d.up(k)), g2));
        r.val[k - 1] = Interval(static_cast<double>(k)) * (t2 - t1);
        r.slack[k - 1] = up_mul(s, k);
    }
    // far indices: all pairs involve a tail mode
    double sa_up = 0, sb_up = 0, sa_dn = 0, sb_dn = 0;
    for (int n = 1; n <= m; ++n) {
        double qn = pow(Interval(f.q), n).hi;
        sa_up = up_add(sa_up, up_mul(am[n], qn));
        sb_up = up_add(sb_up, up_mul(bm[n], qn));
        sa_dn = up_add(sa_dn, up_mul(am[n], d.up(n)));
        sb_dn = up_add(sb_dn, up_mul(bm[n], d.up(n)));
    }
    double c1 = up_add(up_mul(B, up_add(sa_up, sa_dn)), up_mul(A, up_add(sb_up, sb_dn)));
    c1 = up_add(c1, up_mul(2.0 * AB, g2));
    c1 = rnd::sub_up(c1, rnd::mul_dn(2.0 * m + 1.0, rnd::mul_dn(A, B)));
    r.c1 = std::max(0.0, c1);
    r.c2 = AB;
    return r;
}

FieldEnclosure eval_field(const KSField& f, const GeometricBound& u) {
    const int m = f.m;
    QuadBound nq = bilinear(f, u, u);
    FieldEnclosure out;
    out.head.resize(m);
    for (int k = 1; k <= m; ++k) out.head[k - 1] = f.lambda(k) * u.head[k - 1] + nq.at(k);
    // |lambda_k| <= nu k^4 + k^2
    double c0 = 0.0;
    for (int k = m + 1; k <= 2 * m; ++k) c0 = std::max(c0, up_mul(nq.mag(k, f.dec), pow(Interval(f.q), k).hi));
    out.tail.q = f.q;
    out.tail.coef = {c0, nq.c1, up_add(nq.c2, u.C), 0.0, up_mul(f.nu.hi, u.C)};
    out.reduced = geometric_reduce_best(out.tail, f.delta_grid, m + 1);
    return out;
}

double field_tail_sup(const KSField& f, const GeometricBound& u) {
    const int m = f.m;
    QuadBound nq = bilinear(f, u, u);
    double best = 0.0;
    for (int k = m + 1; k <= 2 * m; ++k) {
        double lin = up_mul(f.lambda(k).mag(), up_mul(u.C, f.dec.up(k)));
        best = std::max(best, up_add(lin, nq.mag(k, f.dec)));
    }
    std::vector<double> coef = {0.0, nq.c1, up_add(nq.c2, u.C), 0.0, up_mul(f.nu.hi, u.C)};
    return std::max(best, sup_poly_decay(coef, f.q, 2 * m + 1));
}

Interval partial_derivative(const KSField& f, int i, int k, const GeometricBound& z) {
    if (i < 1 || k < 1) throw std::invalid_argument("mode index starts at 1");
    Interval two_i(2.0 * i);
    if (i == k) return f.lambda(i) + two_i * z.mode(2 * i);
    Interval w = i > k ? -z.mode(i - k) : z.mode(k - i);
    return two_i * (w + z.mode(i + k));
}

BlockNorms derivative_block_norms(const KSField& f, const GeometricBound& E) {
    const int m = f.m;
    const Decay& d = f.dec;
    BlockNorms bn;
    bn.Axx = IMatrix(m, m);
    for (int i = 1; i <= m; ++i)
        for (int k = 1; k <= m; ++k) bn.Axx(i - 1, k - 1) = partial_derivative(f, i, k, E);

    const double C = E.C;
    // sum_{n>N} q^{-n} = q^{-N}/(q-1)
    Interval geo = Interval(1.0) / (Interval(f.q) - Interval(1.0));
    auto tail_sum = [&](int from) { return C == 0 ? 0.0 : up_mul(C, (d(from - 1) * geo).hi); };
    std::vector<double> hm(m + 1, 0.0);
    for (int n = 1; n <= m; ++n) hm[n] = E.head[n - 1].mag();

    bn.row_y.assign(m, 0.0);
    for (int i = 1; i <= m; ++i) {
        double s = tail_sum(m + 1);
        for (int n = m + 1 - i; n <= m; ++n) s = up_add(s, hm[n]);
        s = up_add(s, tail_sum(m + i + 1));
        bn.row_y[i - 1] = up_mul(2.0 * i, s);
    }
    bn.col_y.assign(m, 0.0);
    for (int k = 1; k <= m; ++k) {
        double best = 0.0;
        for (int j = m + 1; j <= m + k; ++j) {
            double v = up_add(hm[j - k], up_mul(C, d.up(j + k)));
            best = std::max(best, up_mul(2.0 * j, v));
        }
        int j = m + k + 1;
        double far = up_mul(2.0 * j, up_mul(C, up_add(d.up(j - k), d.up(j + k))));
        bn.col_y[k - 1] = std::max(best, far);
    }
    // lambda_j + 2j beta, beta >= |z_{2j}| + sum_{k != j}|z_{|j-k|}| + sum_k |z_{j+k}|
    double l1 = tail_sum(m + 1);
    for (int n = 1; n <= m; ++n) l1 = up_add(l1, hm[n]);
    double beta = up_add(up_mul(2.0, l1), up_mul(C, d.up(2 * m + 2)));
    beta = up_add(beta, tail_sum(2 * m + 2));
    double jturn = std::sqrt(1.0 / (6.0 * f.nu.lo)) + 1.0;
    double best = -rnd::kInf;
    for (int j = m + 1;; ++j) {
        double v = up_add(f.lambda(j).hi, up_mul(2.0 * j, beta));
        best = std::max(best, v);
        // derivative 2j - 4 nu j^3 + 2 beta, decreasing for j > jturn
        Interval jj(static_cast<double>(j));
        Interval der = Interval(2.0) * jj - Interval(4.0) * f.nu * jj * jj * jj + Interval(2.0 * beta, up_mul(2.0, beta));
        if (j >= jturn && der.hi < 0) break;
        if (j > 100000) throw std::runtime_error("tail log norm turnover not found");
    }
    bn.mu_yy = best;
    return bn;
}

JMatrix build_J(const KSField& f, const GeometricBound& E) {
    const int m = f.m;
    BlockNorms bn = derivative_block_norms(f, E);
    JMatrix J(m + 1, m + 1);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) J(i, k) = Interval(i == k ? bn.Axx(i, k).hi : bn.Axx(i, k).mag());
        J(i, m) = Interval(bn.row_y[i]);
        J(m, i) = Interval(bn.col_y[i]);
    }
    J(m, m) = Interval(bn.mu_yy);
    return J;
}

Interval isolation_value(const KSField& f, int k, double S) {
    Interval kk(static_cast<double>(k));
    Interval q2 = Interval(f.q) * Interval(f.q) - Interval(1.0);
    return f.lambda(k) + kk * (kk - Interval(1.0)) * Interval(S) + Interval(2.0) * kk * Interval(S) / q2;
}

Interval lognorm_row(const KSField& f, int i, double S) {
    Interval ii(static_cast<double>(i));
    Interval inner = Interval(1.0) / (Interval(f.q) - Interval(1.0)) + f.dec(2 * i);
    return f.lambda(i) + Interval(8.0) * ii * Interval(S) * inner;
}

Interval lognorm_row_var(const KSField& f, int i, double S, double Sc) {
    Interval ii(static_cast<double>(i));
    return Interval(6.0) * ii * Interval(Sc) / (Interval(f.q) - Interval(1.0)) + lognorm_row(f, i, S);
}

IsolationConstants isolation_and_lognorm_constants(const KSField& f, double S, double Sc) {
    if (S < 0 || Sc < 0) throw std::invalid_argument("negative set constant");
    const int cap = 100000;
    IsolationConstants out;
    // every expression below is a quartic with leading -nu k^4; past kt its
    // derivative is decreasing, so one negative derivative value certifies monotone decrease
    double kt = std::sqrt((1.0 + S + 3.0 * Sc) / (6.0 * f.nu.lo)) + 2.0;
    Interval q1 = Interval(1.0) / (Interval(f.q) - Interval(1.0));
    Interval q2 = Interval(1.0) / (Interval(f.q) * Interval(f.q) - Interval(1.0));

    int last_bad = 0;
    for (int k = 1;; ++k) {
        if (k > cap) throw std::runtime_error("isolation not certifiable");
        Interval v = isolation_value(f, k, S);
        if (!(v.hi < 0)) last_bad = k;
        Interval kk(static_cast<double>(k));
        // d/dk [k^2 - nu k^4 + S(k^2 - k) + 2kS/(q^2-1)]
        Interval der = Interval(2.0) * kk - Interval(4.0) * f.nu * kk * kk * kk +
                       Interval(S) * (Interval(2.0) * kk - Interval(1.0)) + Interval(2.0 * S) * q2;
        if (k >= kt && der.hi < 0 && v.hi < 0) break;
    }
    out.K = last_bad + 1;

    // majorants: lambda_i + 8iS(1/(q-1) + 1) and 6iSc/(q-1) on top
    auto scan = [&](auto row, double extra) {
        double best = -rnd::kInf;
        for (int i = 1;; ++i) {
            if (i > cap) throw std::runtime_error("isolation not certifiable");
            best = std::max(best, row(i).hi);
            Interval ii(static_cast<double>(i));
            Interval slope = Interval(8.0 * S) * (q1 + Interval(1.0)) + Interval(extra) * q1;
            Interval maj = f.lambda(i) + ii * slope;
            Interval der = Interval(2.0) * ii - Interval(4.0) * f.nu * ii * ii * ii + slope;
            if (i >= kt && der.hi < 0 && maj.hi <= best) return best;
        }
    };
    out.l = scan([&](int i) { return lognorm_row(f, i, S); }, 0.0);
    out.A = scan([&](int i) { return lognorm_row_var(f, i, S, Sc); }, 6.0 * Sc);
    return out;
}

GeometricBound apply_symmetry(const GeometricBound& u) {
    GeometricBound r = u;
    for (int k = 1; k <= u.m(); k += 2) r.head[k - 1] = -u.head[k - 1];
    return r;
}

IVector galerkin_quad(const IVector& a, const IVector& b) {
    const int m = static_cast<int>(a.size());
    IVector r(m);
    for (int k = 1; k <= m; ++k) {
        Interval t1(0.0), t2(0.0);
        for (int n = 1; n < k; ++n) t1 += a[n - 1] * b[k - n - 1];
        for (int n = 1; n + k <= m; ++n) t2 += a[n - 1] * b[n + k - 1] + b[n - 1] * a[n + k - 1];
        r[k - 1] = Interval(static_cast<double>(k)) * (t2 - t1);
    }
    return r;
}

IMatrix galerkin_dn(const IVector& a) {
    const int m = static_cast<int>(a.size());
    IMatrix D(m, m);
    for (int k = 1; k <= m; ++k)
        for (int l = 1; l <= m; ++l) {
            Interval s(0.0);
            if (l < k) s -= a[k - l - 1];
            if (l > k) s += a[l - k - 1];
            if (l + k <= m) s += a[l + k - 1];
            D(k - 1, l - 1) = Interval(2.0 * k) * s;
        }
    return D;
}

Eigen::MatrixXd galerkin_dn_abs(const IVector& a) {
    const int m = static_cast<int>(a.size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k <= m; ++k)
        for (int l = 1; l <= m; ++l) {
            double s = 0.0;
            if (l < k) s = up_add(s, a[k - l - 1].mag());
            if (l > k) s = up_add(s, a[l - k - 1].mag());
            if (l + k <= m) s = up_add(s, a[l + k - 1].mag());
            D(k - 1, l - 1) = up_mul(2.0 * k, s);
        }
    return D;
}

IVector galerkin_field(const KSField& f, const IVector& x) {
    IVector r = galerkin_quad(x, x);
    for (int k = 1; k <= static_cast<int>(x.size()); ++k) r[k - 1] += f.lambda(k) * x[k - 1];
    return r;
}

}  // namespace ksc
