#include "ksc/c0.hpp"
#include "ksc/lohner.hpp"

namespace ksc {

Doubleton Doubleton::box(const IVector& x) {
    Doubleton d;
    const int n = static_cast<int>(x.size());
    d.mid = ksc::mid(x);
    d.C = Eigen::MatrixXd::Zero(n, 0);
    d.B = Eigen::MatrixXd::Identity(n, n);
    d.R0 = x - to_ivector(d.mid);
    return d;
}

Doubleton Doubleton::affine(const Eigen::VectorXd& center, const Eigen::MatrixXd& C, const IVector& R) {
    Doubleton d;
    const int n = static_cast<int>(center.size());
    d.mid = center;
    d.C = C;
    d.R = R;
    d.B = Eigen::MatrixXd::Identity(n, n);
    d.R0 = IVector(n, Interval(0.0));
    return d;
}

IVector Doubleton::hull() const {
    IVector r = to_ivector(mid);
    if (C.cols() > 0) r = r + C * R;
    return r + B * R0;
}

std::vector<IVector> field_jets(const KSField& f, const IVector& x0, int order) {
    const int m = static_cast<int>(x0.size());
    std::vector<IVector> xj(order + 1);
    xj[0] = x0;
    for (int n = 0; n < order; ++n) {
        IVector s(m, Interval(0.0));
        for (int i = 0; i < n - i; ++i) {
            IVector qv = galerkin_quad(xj[i], xj[n - i]);
            for (int k = 0; k < m; ++k) s[k] += Interval(2.0) * qv[k];
        }
        if (n % 2 == 0) s = s + galerkin_quad(xj[n / 2], xj[n / 2]);
        Interval d(static_cast<double>(n + 1));
        xj[n + 1].resize(m);
        for (int k = 0; k < m; ++k) xj[n + 1][k] = (f.lambda(k + 1) * xj[n][k] + s[k]) / d;
    }
    return xj;
}

std::vector<IMatrix> variational_jets(const KSField& f, const std::vector<IVector>& xj, const IMatrix& W0, int order) {
    const int m = W0.rows();
    std::vector<IMatrix> D;
    for (int i = 0; i < order; ++i) D.push_back(galerkin_dn(xj[i]));
    std::vector<IMatrix> W(order + 1);
    W[0] = W0;
    for (int n = 0; n < order; ++n) {
        IMatrix s(m, W0.cols(), Interval(0.0));
        for (int i = 0; i <= n; ++i) s = s + D[i] * W[n - i];
        Interval d(static_cast<double>(n + 1));
        W[n + 1] = IMatrix(m, W0.cols());
        for (int k = 0; k < m; ++k) {
            Interval lk = f.lambda(k + 1);
            for (int j = 0; j < W0.cols(); ++j) W[n + 1](k, j) = (lk * W[n](k, j) + s(k, j)) / d;
        }
    }
    return W;
}

double C0Integrator::floor_grid(double h) const { return std::floor(h / opt_.grid) * opt_.grid; }

double C0Integrator::suggest_step(const C0State& s, double h_prev) const {
    const int p = opt_.order;
    auto xp = field_jets(f_, to_ivector(s.x.mid), p + 1);
    double top = norm_inf(xp[p + 1]);
    double h = opt_.h_max;
    if (top > 0) h = std::min(h, std::pow(opt_.tol / top, 1.0 / (p + 1)));
    double lm = f_.lambda(f_.m).mag();
    if (lm > 0) h = std::min(h, opt_.kappa / lm);
    if (h_prev > 0) h = std::min(h, 1.2 * h_prev);
    h = floor_grid(h);
    return std::max(h, opt_.grid);
}

double C0Integrator::tail_target(const QuadBound& nb, double factor) const {
    const int m = f_.m;
    double best = 0.0;
    for (int k = m + 1; k <= 2 * m; ++k) {
        Interval lk = f_.lambda(k);
        if (!(lk.hi < 0)) throw std::domain_error("tail mode not dissipative; increase m");
        double b = up_mul(factor, nb.mag(k, f_.dec));
        best = std::max(best, up_div(up_mul(b, pow(Interval(f_.q), k).hi), -lk.hi));
    }
    // (c1 k + c2 k^2)/(nu k^4 - k^2) = (c1/k + c2)/(nu k^2 - 1), decreasing in k
    double K = 2.0 * m + 1.0;
    double den = rnd::sub_dn(rnd::mul_dn(f_.nu.lo, K * K), 1.0);
    if (!(den > 0)) throw std::domain_error("tail mode not dissipative; increase m");
    double num = up_mul(factor, up_add(up_div(nb.c1, K), nb.c2));
    return std::max(best, up_div(num, den));
}

double C0Integrator::tail_after(const QuadBound& nb, double C0, double h, double factor) const {
    const int m = f_.m;
    double best = 0.0;
    Interval hh(h);
    for (int k = m + 1; k <= 2 * m; ++k) {
        Interval lk = f_.lambda(k);
        if (!(lk.hi < 0)) throw std::domain_error("tail mode not dissipative; increase m");
        Interval e = exp(lk * hh);
        Interval b(0.0, up_mul(up_mul(factor, nb.mag(k, f_.dec)), pow(Interval(f_.q), k).hi));
        Interval v = e * Interval(C0) + b * (Interval(1.0) - e) / (-lk);
        best = std::max(best, v.hi);
    }
    double K = 2.0 * m + 1.0;
    double den = rnd::sub_dn(rnd::mul_dn(f_.nu.lo, K * K), 1.0);
    if (!(den > 0)) throw std::domain_error("tail mode not dissipative; increase m");
    double num = up_mul(factor, up_add(up_div(nb.c1, K), nb.c2));
    double eK = exp(f_.lambda(2 * m + 1) * hh).hi;
    return std::max(best, up_add(up_mul(eK, C0), up_div(num, den)));
}

bool C0Integrator::validate(const C0State& s, const GeometricBound& E, double h, GeometricBound& out) const {
    const int m = f_.m;
    IVector X = s.x.hull();
    QuadBound nb = bilinear(f_, E, E);
    Interval th(0.0, h);
    IVector Z(m);
    for (int k = 1; k <= m; ++k) {
        Interval lk = f_.lambda(k);
        Interval nk = nb.at(k);
        Interval z = X[k - 1] + th * (lk * E.head[k - 1] + nk);
        if (lk.hi < 0) {
            // variation of constants: convex combination of x0 and N/(-lambda)
            Interval d = hull(X[k - 1], nk / (-lk));
            if (!intersect(z, d, z)) return false;
        }
        if (!z.subset_of(E.head[k - 1])) return false;
        Z[k - 1] = z;
    }
    double Ct = std::max(s.C, tail_target(nb));
    if (!(Ct <= E.C)) return false;
    out = GeometricBound(Z, Ct, f_.q);
    return true;
}

namespace {

GeometricBound inflate(const GeometricBound& E, const GeometricBound& Z, double factor) {
    IVector h(E.head.size());
    for (size_t k = 0; k < h.size(); ++k) {
        Interval u = Z.head[k];
        double c = u.mid();
        double r = up_add(up_mul(u.rad(), factor), 1e-15 * std::fabs(c));
        h[k] = Interval(rnd::sub_dn(c, r), rnd::add_up(c, r));
    }
    double C = up_mul(Z.C, factor);
    return GeometricBound(h, C, E.q);
}

}  // namespace

EnclosureResult C0Integrator::rough_enclosure(const C0State& s, double h0) const {
    if (!(h0 > 0)) throw std::invalid_argument("step must be positive");
    const int m = f_.m;
    IVector X = s.x.hull();
    GeometricBound U(X, s.C, f_.q);
    QuadBound nu = bilinear(f_, U, U);
    double h = h0;
    for (int halve = 0; halve <= opt_.max_halve; ++halve) {
        IVector e0(m);
        Interval th(0.0, h);
        for (int k = 1; k <= m; ++k) e0[k - 1] = X[k - 1] + th * (f_.lambda(k) * X[k - 1] + nu.at(k));
        GeometricBound E(e0, std::max(s.C, tail_target(nu)), f_.q);
        E = inflate(E, E, 1.5);
        for (int it = 0; it < opt_.max_inflate; ++it) {
            GeometricBound Z;
            if (validate(s, E, h, Z)) return {Z, h};
            // failed check still yields a candidate image; restart from it
            QuadBound nb = bilinear(f_, E, E);
            IVector zz(m);
            for (int k = 1; k <= m; ++k) {
                Interval lk = f_.lambda(k), nk = nb.at(k);
                zz[k - 1] = X[k - 1] + th * (lk * E.head[k - 1] + nk);
                Interval d = hull(X[k - 1], nk / (-lk));
                if (lk.hi < 0 && !intersect(zz[k - 1], d, zz[k - 1])) zz[k - 1] = d;
            }
            Z = GeometricBound(zz, std::max(s.C, tail_target(nb)), f_.q);
            E = inflate(E, Z, 1.1);
        }
        double hn = floor_grid(0.5 * h);
        if (hn < opt_.grid) break;
        h = hn;
    }
    throw std::runtime_error("enclosure failure");
}

C0State C0Integrator::step(const C0State& s, const EnclosureResult& enc, StepRecord* rec) const {
    const int m = f_.m;
    const int p = opt_.order;
    const double h = enc.h;
    const GeometricBound& E = enc.E;
    Interval hh(h);

    IVector X0 = s.x.hull();
    auto xp = field_jets(f_, to_ivector(s.x.mid), p);
    IVector Phi = xp[p];
    for (int i = p - 1; i >= 0; --i)
        for (int k = 0; k < m; ++k) Phi[k] = xp[i][k] + Phi[k] * hh;

    auto xX = field_jets(f_, X0, p);
    auto W = variational_jets(f_, xX, IMatrix::identity(m), p);
    IMatrix T = W[p];
    for (int i = p - 1; i >= 0; --i) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) T(a, b) = W[i](a, b) + T(a, b) * hh;
    }

    auto xE = field_jets(f_, E.head, p + 1);
    Interval hp = pow(hh, p + 1);

    QuadBound NE = bilinear(f_, E, E);
    JMatrix J = build_J(f_, E);
    IMatrix G = expm_upper(J, Interval(0.0, h));
    std::vector<double> ehat(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        for (int l = 0; l < m; ++l) acc = up_add(acc, up_mul(G(k, l).hi, NE.slack[l]));
        ehat[k] = up_mul(h, acc);
    }

    IVector Y0(m);
    for (int k = 0; k < m; ++k) Y0[k] = Phi[k] + xE[p + 1][k] * hp + Interval::sym(ehat[k]);

    C0State out;
    out.x = lohner_update(s.x, T, Y0);
    out.q = s.q;
    out.C = tail_after(NE, s.C, h);
    out.t = s.t + h;

    if (rec) {
        rec->t0 = s.t;
        rec->h = h;
        rec->E = E;
        rec->X0 = X0;
        rec->T = T;
        rec->jetsX = xX;
        rec->NE = NE;
        rec->J = J;
        rec->G = G;
        rec->ehat = ehat;
    }
    return out;
}

C0State C0Integrator::integrate(const C0State& s0, double T, std::vector<TraceEntry>* trace) const {
    if (!(T >= s0.t)) throw std::invalid_argument("target time before current time");
    C0State s = s0;
    double hprev = 0.0;
    for (long n = 0; s.t < T; ++n) {
        if (n >= opt_.max_steps) throw std::runtime_error("step limit exceeded");
        double h = suggest_step(s, hprev);
        if (s.t + h >= T) h = T - s.t;
        EnclosureResult enc = rough_enclosure(s, h);
        if (trace) trace->push_back({s.t, enc.h, enc.E});
        s = step(s, enc, nullptr);
        hprev = enc.h;
    }
    return s;
}

}  // namespace ksc
