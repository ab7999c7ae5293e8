#include "ksc/poincare.hpp"

namespace ksc {

Section Section::coordinate(int m, int k, int orientation) {
    if (k < 0 || k >= m) throw std::invalid_argument("section coordinate out of range");
    Section s;
    s.n = Eigen::VectorXd::Zero(m);
    s.n(k) = 1.0;
    s.orientation = orientation >= 0 ? 1 : -1;
    s.pivot = k;
    return s;
}

Interval Section::eval(const IVector& x) const {
    Interval a(c);
    for (int k = 0; k < n.size(); ++k)
        if (n(k) != 0) a += Interval(n(k)) * x[k];
    return a;
}

Interval Section::eval(const Doubleton& x) const {
    const int m = static_cast<int>(n.size());
    Interval a(c);
    for (int k = 0; k < m; ++k)
        if (n(k) != 0) a += Interval(n(k)) * Interval(x.mid(k));
    auto part = [&](const Eigen::MatrixXd& M, const IVector& R) {
        for (int j = 0; j < M.cols(); ++j) {
            Interval w(0.0);
            for (int k = 0; k < m; ++k)
                if (n(k) != 0) w += Interval(n(k)) * Interval(M(k, j));
            a += w * R[j];
        }
    };
    if (x.C.cols() > 0) part(x.C, x.R);
    part(x.B, x.R0);
    return a;
}

Interval Section::derivative(const IVector& Fx) const { return eval(Fx) - Interval(c); }

IMatrix Section::embedding() const {
    const int m = static_cast<int>(n.size());
    IMatrix E(m, m - 1, Interval(0.0));
    Interval np(n(pivot));
    for (int l = 0, col = 0; l < m; ++l) {
        if (l == pivot) continue;
        E(l, col) = Interval(1.0);
        if (n(l) != 0) E(pivot, col) = -Interval(n(l)) / np;
        ++col;
    }
    return E;
}

IVector Section::offset() const {
    IVector o(n.size(), Interval(0.0));
    if (c != 0) o[pivot] = -Interval(c) / Interval(n(pivot));
    return o;
}

namespace {

IMatrix drop_pivot_rows(const IMatrix& M, int pivot) {
    IMatrix r(M.rows() - 1, M.cols());
    for (int i = 0, row = 0; i < M.rows(); ++i) {
        if (i == pivot) continue;
        for (int j = 0; j < M.cols(); ++j) r(row, j) = M(i, j);
        ++row;
    }
    return r;
}

IMatrix projector(int m, int pivot) { return drop_pivot_rows(IMatrix::identity(m), pivot); }

struct Driver {
    const C0Integrator& I;
    const C1Integrator* I1;
};

Crossing cross_impl(const Driver& d, C0State s, C1Frame* V, const Section& sec, double t_max, CrossingC1* dv) {
    const C0Integrator& I = d.I;
    const KSField& f = I.field();
    const int m = f.m;
    const int sgn = sec.orientation;
    bool armed = false;
    double hprev = 0.0;
    for (long steps = 0;; ++steps) {
        if (steps >= I.options().max_steps) throw std::runtime_error("step limit exceeded");
        if (!(s.t < t_max)) throw std::runtime_error("no crossing before t_max");
        Interval a0 = sec.eval(s.x);
        if (!armed) armed = sgn > 0 ? a0.hi < 0 : a0.lo > 0;
        double h = I.suggest_step(s, hprev);
        if (s.t + h > t_max) h = t_max - s.t;

        bool crossing = false;
        Interval sigma;
        IVector Fx;
        Interval da;
        EnclosureResult enc;
        C1Enclosure venc;
        for (int tries = 0;; ++tries) {
            if (d.I1)
                std::tie(enc, venc) = d.I1->enclosure(s, h);
            else
                enc = I.rough_enclosure(s, h);
            if (!armed || !sec.eval(enc.E.head).contains_zero()) break;
            Fx = eval_field(f, enc.E).head;
            da = sec.derivative(Fx);
            if (sgn > 0 ? da.hi < 0 : da.lo > 0) break;  // moving away from the section
            if (da.contains_zero()) {
                if (tries >= 8) throw std::runtime_error("non-transversal");
                h = I.floor_grid(0.5 * enc.h);
                if (h < I.options().grid) throw std::runtime_error("non-transversal");
                continue;
            }
            sigma = -a0 / da;
            if (sigma.hi <= enc.h) {
                crossing = true;
            } else {
                double hs = I.floor_grid(sigma.lo);
                if (hs < I.options().grid) throw std::runtime_error("non-transversal");
                enc.h = std::min(enc.h, hs);
            }
            break;
        }

        if (!crossing) {
            if (d.I1)
                std::tie(s, *V) = d.I1->step(s, *V, enc, venc);
            else
                s = I.step(s, enc);
            hprev = enc.h;
            continue;
        }

        Crossing cr;
        double hs = std::min(enc.h, I.floor_grid(sigma.mid()));
        EnclosureResult part{enc.E, hs};
        C0State at = s;
        C1StepRecord vrec;
        C1Frame Vt;
        if (hs > 0) {
            if (d.I1)
                std::tie(at, Vt) = d.I1->step(s, *V, part, venc, nullptr, &vrec);
            else
                at = I.step(s, part);
        } else if (d.I1) {
            Vt = *V;
            vrec.Exx = venc.W * V->Vxx.hull();
            vrec.CE.assign(m, 0.0);
            for (int j = 0; j < m; ++j) {
                double c = up_mul(V->C[j], venc.Vhat.C);
                for (int k = 0; k < m; ++k) {
                    c = up_add(c, up_mul(venc.CW[k], V->Vxx.hull()(k, j).mag()));
                    vrec.Exx(k, j) += venc.Vhat.head[k] * Interval(V->C[j]);
                }
                vrec.CE[j] = c;
            }
        }
        cr.before = at;
        cr.enc = enc;
        cr.t_star = s.t + hs;
        cr.tau = sigma - Interval(hs);
        cr.T = Interval(s.t) + sigma;
        cr.Fx = Fx;
        cr.dalpha = da;
        cr.C = enc.E.C;

        // P(y) = y - rho alpha(y), rho in Fx / alpha'
        IVector rho(m);
        for (int k = 0; k < m; ++k) rho[k] = Fx[k] / da;
        cr.rho_hat = mid(rho);
        double rest = 1.0;
        for (int k = 0; k < m; ++k)
            if (k != sec.pivot) rest -= sec.n(k) * cr.rho_hat(k);
        cr.rho_hat(sec.pivot) = rest / sec.n(sec.pivot);
        cr.L = IMatrix::identity(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (sec.n(j) != 0) cr.L(i, j) -= Interval(cr.rho_hat(i)) * Interval(sec.n(j));
        cr.shift.resize(m);
        for (int k = 0; k < m; ++k) cr.shift[k] = -(Interval(cr.rho_hat(k)) * Interval(sec.c));
        Interval a_star = sec.eval(at.x);
        cr.err.resize(m);
        for (int k = 0; k < m; ++k) cr.err[k] = -((rho[k] - Interval(cr.rho_hat(k))) * a_star);

        if (dv) {
            // V(t* + tau) in V(t*) + tau (DF V) over the step
            BlockNorms bn = derivative_block_norms(f, enc.E);
            IMatrix dV = bn.Axx * vrec.Exx;
            double qm = f.dec.up(m + 1);
            for (int k = 0; k < m; ++k)
                for (int j = 0; j < m; ++j) dV(k, j) += Interval::sym(up_mul(bn.row_y[k], up_mul(vrec.CE[j], qm)));
            dv->Vxx = Vt.Vxx.hull();
            for (int k = 0; k < m; ++k)
                for (int j = 0; j < m; ++j) dv->Vxx(k, j) += cr.tau * dV(k, j);
            dv->C = vrec.CE;
            dv->z = apply_upper(expm_upper(build_J(f, enc.E), Interval(0.0, enc.h)), V->z);
            dv->D = field_tail_sup(f, enc.E);
        }
        return cr;
    }
}

}  // namespace

IVector Crossing::image(const IMatrix& M, const IVector& o) const {
    IMatrix ML = M * L;
    IVector r = ML * to_ivector(before.x.mid) + M * (shift + err) + o;
    if (before.x.C.cols() > 0) r = r + (ML * IMatrix::from(before.x.C)) * before.x.R;
    return r + (ML * IMatrix::from(before.x.B)) * before.x.R0;
}

IVector Crossing::section_hull(const Section& s) const {
    return image(projector(before.m(), s.pivot), IVector(before.m() - 1, Interval(0.0)));
}

C0State Crossing::on_section(const Section& s) const {
    const int m = before.m();
    IMatrix Pi = projector(m, s.pivot);
    IMatrix Emb = s.embedding();
    IMatrix T = Emb * (Pi * L);
    IVector y = L * to_ivector(before.x.mid) + shift + err;
    IVector Y0 = Emb * (Pi * y) + s.offset();
    C0State out;
    out.x = lohner_update(before.x, T, Y0);
    out.C = C;
    out.q = before.q;
    out.t = 0.0;
    return out;
}

Crossing cross_section(const C0Integrator& I, const C0State& s0, const Section& sec, double t_max) {
    return cross_impl({I, nullptr}, s0, nullptr, sec, t_max, nullptr);
}

Crossing cross_section(const C1Integrator& I, const C0State& s0, const C1Frame& V0, const Section& sec, double t_max,
                       CrossingC1& dv) {
    C1Frame V = V0;
    return cross_impl({I.c0(), &I}, s0, &V, sec, t_max, &dv);
}

ReturnTimeDerivative return_time_derivative(const Section& sec, const IMatrix& Vxx, const std::vector<double>& z,
                                            const IVector& Fx) {
    const int m = Vxx.rows();
    Interval den = sec.derivative(Fx);
    if (den.contains_zero()) throw std::runtime_error("transversality lost");
    ReturnTimeDerivative r;
    r.g = Interval(1.0) / den;
    r.dT.assign(m, Interval(0.0));
    for (int j = 0; j < m; ++j) {
        Interval s(0.0);
        for (int i = 0; i < m; ++i)
            if (sec.n(i) != 0) s += Interval(sec.n(i)) * Vxx(i, j);
        r.dT[j] = -(r.g * s);
    }
    double s = 0.0;
    for (int i = 0; i < m; ++i) s = up_add(s, up_mul(std::fabs(sec.n(i)), z[i]));
    r.tail = up_mul(r.g.mag(), s);
    return r;
}

double DPBlocks::Pyx() const { return norm_2_upper(to_ivector(Eigen::Map<const Eigen::VectorXd>(Pyx_col.data(), Pyx_col.size()))); }

DPBlocks poincare_derivative_blocks(const Section& sec, const CrossingC1& dv, const IVector& Fx, const Interval& T,
                                    double q) {
    const int m = dv.Vxx.rows();
    ReturnTimeDerivative rt = return_time_derivative(sec, dv.Vxx, dv.z, Fx);
    DPBlocks P;
    P.T = T;
    P.g = rt.g;
    P.Pxx = dv.Vxx;
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) P.Pxx(k, j) += Fx[k] * rt.dT[j];
    P.Pxy.resize(m);
    for (int k = 0; k < m; ++k) P.Pxy[k] = up_add(dv.z[k], up_mul(Fx[k].mag(), rt.tail));
    double qm = qneg(q, m + 1).hi;
    P.Pyx_col.resize(m);
    for (int j = 0; j < m; ++j) P.Pyx_col[j] = up_add(up_mul(dv.C[j], qm), up_mul(dv.D, rt.dT[j].mag()));
    P.Pyy = up_add(dv.z[m], up_mul(dv.D, rt.tail));
    return P;
}

DPBlocks restrict_to_section(const DPBlocks& P, const Section& sec) {
    const int m = P.Pxx.rows();
    IMatrix Emb = sec.embedding();
    DPBlocks r;
    r.T = P.T;
    r.g = P.g;
    r.Pxx = drop_pivot_rows(P.Pxx, sec.pivot) * Emb;
    for (int i = 0; i < m; ++i)
        if (i != sec.pivot) r.Pxy.push_back(P.Pxy[i]);
    r.Pyx_col.assign(m - 1, 0.0);
    for (int l = 0; l < m - 1; ++l)
        for (int j = 0; j < m; ++j) r.Pyx_col[l] = up_add(r.Pyx_col[l], up_mul(P.Pyx_col[j], Emb(j, l).mag()));
    r.Pyy = P.Pyy;
    return r;
}

DPBlocks apply_symmetry(const DPBlocks& P) {
    DPBlocks r = P;
    for (int k = 0; k < r.Pxx.rows(); k += 2)
        for (int j = 0; j < r.Pxx.cols(); ++j) r.Pxx(k, j) = -r.Pxx(k, j);
    return r;
}

double FrameNorms::total() const { return std::max(up_add(xx, xy), up_add(yx, yy)); }

FrameNorms change_frame(const DPBlocks& P, const Eigen::MatrixXd& A) {
    const int n = P.Pxx.rows();
    if (A.rows() != n || A.cols() != n) throw std::invalid_argument("dimension mismatch");
    IMatrix B = inverse_enclosure(A);
    FrameNorms F;
    // the identity frame is exact, skip the product rounding
    F.Mxx = A.isIdentity(0.0) ? P.Pxx : B * P.Pxx * IMatrix::from(A);
    F.Mxy.assign(n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) F.Mxy[k] = up_add(F.Mxy[k], up_mul(B(k, i).mag(), P.Pxy[i]));
    F.xx = norm_2_upper(F.Mxx);
    F.xy = norm_2_upper(to_ivector(Eigen::Map<const Eigen::VectorXd>(F.Mxy.data(), n)));
    // rows of P_yx A: |.|_l <= sum_j col_j |A_jl|
    IVector ca(n, Interval(0.0));
    for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s = up_add(s, up_mul(P.Pyx_col[j], std::fabs(A(j, l))));
        ca[l] = Interval(s);
    }
    F.yx = std::min(norm_2_upper(ca), up_mul(P.Pyx(), norm_2_upper(IMatrix::from(A))));
    F.yy = P.Pyy;
    return F;
}

C0State apply_symmetry(const C0State& s) {
    C0State r = s;
    for (int k = 0; k < s.m(); k += 2) {
        r.x.mid(k) = -r.x.mid(k);
        if (r.x.C.cols() > 0) r.x.C.row(k) *= -1.0;
        r.x.B.row(k) *= -1.0;
    }
    return r;
}

}  // namespace ksc
