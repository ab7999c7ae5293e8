#include "ksc/tails.hpp"

#include <sstream>

namespace ksc {

Interval qneg(double q, int k) {
    if (k < 0) throw std::invalid_argument("negative decay index");
    return pow(Interval(1.0) / Interval(q), k);
}

Decay::Decay(double q, int n) : q_(q), t_(n + 1) {
    if (!(q > 1.0)) throw std::invalid_argument("decay ratio must exceed 1");
    Interval r = Interval(1.0) / Interval(q);
    t_[0] = Interval(1.0);
    // repeated products drift; re-anchor with pow every 32 entries
    for (int k = 1; k <= n; ++k) t_[k] = (k % 32 == 0) ? pow(r, k) : t_[k - 1] * r;
}

GeometricBound::GeometricBound(IVector h, double c, double q_) : head(std::move(h)), C(c), q(q_) {
    if (!(q > 1.0)) throw std::invalid_argument("decay ratio must exceed 1");
    if (!(C >= 0.0) || !std::isfinite(C)) throw std::invalid_argument("tail constant must be finite and nonnegative");
    for (const auto& x : head)
        if (!x.finite()) throw std::invalid_argument("unbounded head entry");
}

GeometricBound GeometricBound::zero(int m, double q) { return GeometricBound(IVector(m, Interval(0.0)), 0.0, q); }

GeometricBound GeometricBound::point(const Eigen::VectorXd& a, double q) {
    return GeometricBound(to_ivector(a), 0.0, q);
}

Interval GeometricBound::mode(int k) const {
    if (k < 1) throw std::invalid_argument("mode index starts at 1");
    if (k <= m()) return head[k - 1];
    if (C == 0.0) return Interval(0.0);
    return Interval::sym(up_mul(C, qneg(q, k).hi));
}

double GeometricBound::mode_mag(int k) const { return mode(k).mag(); }

bool GeometricBound::member(const std::vector<double>& a) const {
    for (int k = 1; k <= m(); ++k) {
        double v = k <= static_cast<int>(a.size()) ? a[k - 1] : 0.0;
        if (!head[k - 1].contains(v)) return false;
    }
    for (int k = m() + 1; k <= static_cast<int>(a.size()); ++k) {
        // |a_k| q^k <= C, checked outward
        Interval s = Interval(std::fabs(a[k - 1])) * pow(Interval(q), k);
        if (s.lo > C) return false;
    }
    return true;
}

double PolyGeometricBound::eval_up(double k) const {
    double s = 0.0, p = 1.0;
    for (double c : coef) {
        s = up_add(s, up_mul(c, p));
        p = up_mul(p, k);
    }
    return s;
}

double sup_poly_decay(const std::vector<double>& coef, double d, int k0) {
    if (!(d > 1.0)) throw std::invalid_argument("decay ratio must exceed 1");
    if (k0 < 1) k0 = 1;
    int deg = 0;
    for (int j = 0; j < static_cast<int>(coef.size()); ++j)
        if (coef[j] > 0) deg = j;
    PolyGeometricBound p{coef, d};
    Interval dinv = Interval(1.0) / Interval(d);
    Interval dk = pow(dinv, k0);
    double best = 0.0;
    // P(k+1)/P(k) <= ((k+1)/k)^deg, so P(k) d^{-k} decreases once that is below d
    for (int k = k0; k < 100000; ++k) {
        best = std::max(best, up_mul(p.eval_up(k), dk.hi));
        Interval ratio = pow(Interval(k + 1) / Interval(k), deg);
        if (ratio.hi <= d) return best;
        dk = dk * dinv;
    }
    throw std::runtime_error("polynomial decay turnover not found");
}

GeometricTail geometric_reduce(const PolyGeometricBound& b, double delta) {
    if (!(delta > 1.0 && delta < b.q)) throw std::invalid_argument("delta outside (1, q)");
    GeometricTail t;
    t.C = sup_poly_decay(b.coef, delta, 1);
    t.q = rnd::div_dn(b.q, delta);
    return t;
}

GeometricTail geometric_reduce_best(const PolyGeometricBound& b, const std::vector<double>& grid, int k0) {
    GeometricTail best;
    double score = rnd::kInf;
    for (double d : grid) {
        if (!(d > 1.0 && d < b.q)) continue;
        GeometricTail t = geometric_reduce(b, d);
        double s = up_mul(t.C, qneg(t.q, k0).hi);
        if (s < score) {
            score = s;
            best = t;
        }
    }
    if (!std::isfinite(score)) throw std::invalid_argument("empty delta grid");
    return best;
}

bool contains(const GeometricBound& outer, const GeometricBound& inner) {
    if (inner.q < outer.q && inner.C > 0) throw std::invalid_argument("incomparable tails");
    int top = std::max(outer.m(), inner.m());
    for (int k = 1; k <= top; ++k) {
        Interval a = inner.mode(k);
        if (k <= outer.m()) {
            if (!a.subset_of(outer.head[k - 1])) return false;
        } else {
            // |a| <= C_out q_out^{-k}
            if (a.mag() > rnd::mul_dn(outer.C, qneg(outer.q, k).lo)) return false;
        }
    }
    if (inner.C == 0) return true;
    if (inner.q == outer.q) return inner.C <= outer.C;
    // faster decay: ratio (q_out/q_in)^k is decreasing, check at the first tail index
    int k = top + 1;
    return up_mul(inner.C, qneg(inner.q, k).hi) <= rnd::mul_dn(outer.C, qneg(outer.q, k).lo);
}

GeometricBound operator+(const GeometricBound& a, const GeometricBound& b) {
    if (a.q != b.q) throw std::invalid_argument("mismatched decay ratios");
    if (a.m() != b.m()) throw std::invalid_argument("dimension mismatch");
    return GeometricBound(a.head + b.head, up_add(a.C, b.C), a.q);
}

GeometricBound operator*(const Interval& s, const GeometricBound& a) {
    IVector h(a.head.size());
    for (size_t i = 0; i < h.size(); ++i) h[i] = s * a.head[i];
    return GeometricBound(h, up_mul(s.mag(), a.C), a.q);
}

std::string to_text(const GeometricBound& a) {
    std::ostringstream os;
    os << "m " << a.m() << "\nq " << decimal_down(a.q) << "\n";
    for (const auto& x : a.head) {
        auto s = to_strings(x);
        os << s.first << " " << s.second << "\n";
    }
    os << "C " << decimal_up(a.C) << "\n";
    return os.str();
}

}  // namespace ksc
