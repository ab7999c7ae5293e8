#include "ksc/c1.hpp"

namespace ksc {

C1Frame C1Frame::identity(int m) {
    C1Frame V;
    V.Vxx = MatDoubleton::identity(m);
    V.C.assign(m, 0.0);
    V.z.assign(m + 1, 0.0);
    V.z[m] = 1.0;
    return V;
}

namespace {

GeometricBound widen(const GeometricBound& Z, double factor) {
    IVector h(Z.head.size());
    for (size_t k = 0; k < h.size(); ++k) {
        double c = Z.head[k].mid();
        double r = up_add(up_mul(Z.head[k].rad(), factor), up_add(1e-15 * std::fabs(c), 1e-300));
        h[k] = Interval(rnd::sub_dn(c, r), rnd::add_up(c, r));
    }
    return GeometricBound(h, up_mul(Z.C, factor), Z.q);
}

GeometricBound column(const IMatrix& W, const std::vector<double>& C, int j, double q) {
    return GeometricBound(W.col(j), C[j], q);
}

}  // namespace

bool C1Integrator::column_enclosure(const GeometricBound& E, const GeometricBound& w0, double h,
                                    GeometricBound& out) const {
    const KSField& f = c0_.field();
    const int m = f.m;
    const Interval th(0.0, h);
    const Interval two(2.0);
    // image of the candidate W under the Euler box / variation of constants; ok = W validated
    auto image = [&](const GeometricBound& W, bool& ok) {
        QuadBound nb = bilinear(f, E, W);
        IVector Z(m);
        ok = true;
        for (int k = 1; k <= m; ++k) {
            Interval lk = f.lambda(k), nk = two * nb.at(k);
            Interval z = w0.head[k - 1] + th * (lk * W.head[k - 1] + nk);
            if (lk.hi < 0) {
                Interval d = hull(w0.head[k - 1], nk / (-lk));
                if (!intersect(z, d, z)) {
                    ok = false;
                    z = d;
                }
            }
            if (!z.subset_of(W.head[k - 1])) ok = false;
            Z[k - 1] = z;
        }
        double Ct = std::max(w0.C, c0_.tail_target(nb, 2.0));
        if (!(Ct <= W.C)) ok = false;
        return GeometricBound(Z, Ct, f.q);
    };
    bool ok = false;
    GeometricBound W = widen(image(w0, ok), 1.5);
    for (int it = 0; it < c0_.options().max_inflate; ++it) {
        GeometricBound Z = image(W, ok);
        if (ok) {
            out = Z;
            return true;
        }
        W = widen(Z, 1.1);
    }
    return false;
}

std::pair<EnclosureResult, C1Enclosure> C1Integrator::enclosure(const C0State& s, double h0) const {
    const int m = c0_.field().m;
    const double q = c0_.field().q;
    double h = h0;
    for (int halve = 0; halve <= c0_.options().max_halve; ++halve) {
        EnclosureResult enc = c0_.rough_enclosure(s, h);
        C1Enclosure ve;
        ve.W = IMatrix(m, m);
        ve.CW.assign(m, 0.0);
        bool ok = true;
        for (int j = 0; j < m && ok; ++j) {
            IVector e(m, Interval(0.0));
            e[j] = Interval(1.0);
            GeometricBound Wj;
            ok = column_enclosure(enc.E, GeometricBound(e, 0.0, q), enc.h, Wj);
            if (ok) {
                ve.W.set_col(j, Wj.head);
                ve.CW[j] = Wj.C;
            }
        }
        if (ok) ok = column_enclosure(enc.E, GeometricBound(IVector(m, Interval(0.0)), 1.0, q), enc.h, ve.Vhat);
        if (ok) return {enc, ve};
        h = c0_.floor_grid(0.5 * enc.h);
        if (h < c0_.options().grid) break;
    }
    throw std::runtime_error("C1 enclosure failure");
}

std::pair<C0State, C1Frame> C1Integrator::step(const C0State& s, const C1Frame& V, const EnclosureResult& enc,
                                               const C1Enclosure& venc, StepRecord* rec_out,
                                               C1StepRecord* vrec) const {
    const KSField& f = c0_.field();
    const int m = f.m;
    const int p = c0_.options().order;
    const double h = enc.h;
    const Interval hh(h);
    const GeometricBound& E = enc.E;

    StepRecord rec;
    C0State s1 = c0_.step(s, enc, &rec);

    // Taylor remainder of the Galerkin variational flow
    auto xE = field_jets(f, E.head, p + 1);
    auto WE = variational_jets(f, xE, venc.W, p + 1);
    IMatrix Delta = WE[p + 1];
    Interval hp = pow(hh, p + 1);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) Delta(a, b) = Delta(a, b) * hp;

    // comparison with the Galerkin reference: forcing |DN(W) e| + tail pairs
    for (int j = 0; j < m; ++j) {
        GeometricBound Wj = column(venc.W, venc.CW, j, f.q);
        Eigen::MatrixXd Mj = galerkin_dn_abs(Wj.head);
        QuadBound nb = bilinear(f, E, Wj);
        std::vector<double> force(m + 1, 0.0);
        for (int k = 0; k < m; ++k) {
            double acc = up_mul(2.0, nb.slack[k]);
            for (int l = 0; l < m; ++l) acc = up_add(acc, up_mul(Mj(k, l), rec.ehat[l]));
            force[k] = acc;
        }
        std::vector<double> e = apply_upper(rec.G, force);
        for (int k = 0; k < m; ++k) Delta(k, j) += Interval::sym(up_mul(h, e[k]));
    }

    // part driven by the tail of the old columns, linear in C_j
    QuadBound nh = bilinear(f, E, venc.Vhat);
    std::vector<double> gh(m + 1, 0.0);
    for (int k = 0; k < m; ++k) gh[k] = up_mul(2.0, nh.slack[k]);
    std::vector<double> vh = apply_upper(rec.G, gh);
    IMatrix Vold = V.Vxx.hull();
    IMatrix add = Delta * Vold;
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) add(k, j) += Interval::sym(up_mul(up_mul(h, vh[k]), V.C[j]));

    C1Frame out;
    out.Vxx = lohner_update(V.Vxx, rec.T, add);

    std::vector<double> Ct(m);
    for (int k = 0; k < m; ++k) Ct[k] = c0_.tail_after(bilinear(f, E, column(venc.W, venc.CW, k, f.q)), 0.0, h, 2.0);
    double Chat = c0_.tail_after(nh, 1.0, h, 2.0);
    out.C.assign(m, 0.0);
    for (int j = 0; j < m; ++j) {
        double c = up_mul(V.C[j], Chat);
        for (int k = 0; k < m; ++k) c = up_add(c, up_mul(Ct[k], Vold(k, j).mag()));
        out.C[j] = c;
    }

    out.z = apply_upper(expm_upper(rec.J, hh), V.z);

    if (vrec) {
        vrec->Exx = venc.W * Vold;
        vrec->CE.assign(m, 0.0);
        for (int j = 0; j < m; ++j) {
            double c = up_mul(V.C[j], venc.Vhat.C);
            for (int k = 0; k < m; ++k) {
                c = up_add(c, up_mul(venc.CW[k], Vold(k, j).mag()));
                vrec->Exx(k, j) += venc.Vhat.head[k] * Interval(V.C[j]);
            }
            vrec->CE[j] = c;
        }
        vrec->zE = apply_upper(rec.G, V.z);
    }
    if (rec_out) *rec_out = std::move(rec);
    return {s1, out};
}

std::pair<C0State, C1Frame> C1Integrator::integrate(const C0State& s0, const C1Frame& V0, double T) const {
    if (!(T >= s0.t)) throw std::invalid_argument("target time before current time");
    C0State s = s0;
    C1Frame V = V0;
    double hprev = 0.0;
    for (long n = 0; s.t < T; ++n) {
        if (n >= c0_.options().max_steps) throw std::runtime_error("step limit exceeded");
        double h = c0_.suggest_step(s, hprev);
        if (s.t + h >= T) h = T - s.t;
        auto [enc, venc] = enclosure(s, h);
        std::tie(s, V) = step(s, V, enc, venc);
        hprev = enc.h;
    }
    return {s, V};
}

}  // namespace ksc
