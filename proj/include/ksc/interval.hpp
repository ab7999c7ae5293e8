#pragma once

#include <bit>
#include <cstdint>
#include <cmath>
#include <cfloat>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>
#include <utility>
#include <algorithm>

#include <Eigen/Dense>

namespace ksc {

// Directed rounding. Each primitive computes the nearest result, recovers the
// exact residual with an error-free transformation and steps one ulp outward
// only when the residual points that way.
namespace rnd {

constexpr double kInf = std::numeric_limits<double>::infinity();
// below this magnitude fma residuals are not guaranteed exact
constexpr double kTiny = 1e-290;

inline double succ(double x) {
    if (!(x < kInf)) return x;
    if (x == 0) return std::numeric_limits<double>::denorm_min();
    auto b = std::bit_cast<std::uint64_t>(x);
    return std::bit_cast<double>(x > 0 ? b + 1 : b - 1);
}
inline double pred(double x) { return -succ(-x); }

inline double two_sum_err(double a, double b, double s) {
    double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

inline double add_dn(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return s;
    return two_sum_err(a, b, s) < 0 ? pred(s) : s;
}
inline double add_up(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return s;
    return two_sum_err(a, b, s) > 0 ? succ(s) : s;
}
inline double sub_dn(double a, double b) { return add_dn(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_dn(double a, double b) {
    if (a == 0 || b == 0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return p;
    if (std::fabs(p) < kTiny) return pred(p);
    return std::fma(a, b, -p) < 0 ? pred(p) : p;
}
inline double mul_up(double a, double b) {
    if (a == 0 || b == 0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return p;
    if (std::fabs(p) < kTiny) return succ(p);
    return std::fma(a, b, -p) > 0 ? succ(p) : p;
}

// sign of (exact a/b - q)
inline int div_dir(double a, double b, double q) {
    double r = std::fma(-q, b, a);
    if (r == 0) return 0;
    return ((r > 0) == (b > 0)) ? 1 : -1;
}
inline double div_dn(double a, double b) {
    if (a == 0) return 0.0;
    double q = a / b;
    if (!std::isfinite(q)) return q;
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return pred(q);
    return div_dir(a, b, q) < 0 ? pred(q) : q;
}
inline double div_up(double a, double b) {
    if (a == 0) return 0.0;
    double q = a / b;
    if (!std::isfinite(q)) return q;
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return succ(q);
    return div_dir(a, b, q) > 0 ? succ(q) : q;
}

inline double sqrt_dn(double x) {
    if (x <= 0) return 0.0;
    double s = std::sqrt(x);
    if (x < kTiny) return pred(s);
    return std::fma(-s, s, x) < 0 ? pred(s) : s;
}
inline double sqrt_up(double x) {
    if (x <= 0) return 0.0;
    double s = std::sqrt(x);
    if (x < kTiny) return succ(s);
    return std::fma(-s, s, x) > 0 ? succ(s) : s;
}

}  // namespace rnd

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double x) : lo(x), hi(x) {}  // NOLINT: implicit on purpose
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(l <= h)) throw std::invalid_argument("interval with lo > hi");
    }

    static Interval hull(double a, double b) { return a <= b ? Interval(a, b) : Interval(b, a); }
    static Interval sym(double r) { return Interval(-r, r); }

    double mid() const {
        double m = 0.5 * (lo + hi);
        if (!std::isfinite(m)) m = 0.5 * lo + 0.5 * hi;
        return m;
    }
    // radius around mid(), rounded up
    double rad() const {
        double m = mid();
        return std::max(rnd::sub_up(hi, m), rnd::sub_up(m, lo));
    }
    double width() const { return rnd::sub_up(hi, lo); }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    double mig() const {
        if (lo <= 0 && hi >= 0) return 0.0;
        return std::min(std::fabs(lo), std::fabs(hi));
    }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains_zero() const { return lo <= 0 && 0 <= hi; }
    bool subset_of(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool interior_of(const Interval& o) const { return o.lo < lo && hi < o.hi; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool is_point() const { return lo == hi; }
};

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}
// returns false when empty
inline bool intersect(const Interval& a, const Interval& b, Interval& out) {
    double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
    if (l > h) return false;
    out = Interval(l, h);
    return true;
}

inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }
inline Interval operator+(const Interval& a, const Interval& b) {
    return Interval(rnd::add_dn(a.lo, b.lo), rnd::add_up(a.hi, b.hi));
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return Interval(rnd::sub_dn(a.lo, b.hi), rnd::sub_up(a.hi, b.lo));
}
// extreme products rounded outward by their FMA residual, so exact products stay exact
inline Interval operator*(const Interval& a, const Interval& b) {
    const double x[4] = {a.lo, a.lo, a.hi, a.hi}, y[4] = {b.lo, b.hi, b.lo, b.hi};
    double p[4];
    for (int i = 0; i < 4; ++i) p[i] = x[i] * y[i];
    double l = std::min(std::min(p[0], p[1]), std::min(p[2], p[3]));
    double h = std::max(std::max(p[0], p[1]), std::max(p[2], p[3]));
    if (std::isfinite(l) && std::isfinite(h)) {
        double lo = l, hi = h;
        for (int i = 0; i < 4; ++i) {
            if (p[i] == l) lo = std::min(lo, rnd::mul_dn(x[i], y[i]));
            if (p[i] == h) hi = std::max(hi, rnd::mul_up(x[i], y[i]));
        }
        return Interval(lo, hi);
    }
    if (a.lo >= 0 && b.lo >= 0)
        return Interval(rnd::mul_dn(a.lo, b.lo), rnd::mul_up(a.hi, b.hi));
    if (a.hi <= 0 && b.hi <= 0)
        return Interval(rnd::mul_dn(a.hi, b.hi), rnd::mul_up(a.lo, b.lo));
    l = std::min(std::min(rnd::mul_dn(a.lo, b.lo), rnd::mul_dn(a.lo, b.hi)),
                 std::min(rnd::mul_dn(a.hi, b.lo), rnd::mul_dn(a.hi, b.hi)));
    h = std::max(std::max(rnd::mul_up(a.lo, b.lo), rnd::mul_up(a.lo, b.hi)),
                 std::max(rnd::mul_up(a.hi, b.lo), rnd::mul_up(a.hi, b.hi)));
    return Interval(l, h);
}
inline Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw std::domain_error("divisor straddles zero");
    double l = std::min(std::min(rnd::div_dn(a.lo, b.lo), rnd::div_dn(a.lo, b.hi)),
                        std::min(rnd::div_dn(a.hi, b.lo), rnd::div_dn(a.hi, b.hi)));
    double h = std::max(std::max(rnd::div_up(a.lo, b.lo), rnd::div_up(a.lo, b.hi)),
                        std::max(rnd::div_up(a.hi, b.lo), rnd::div_up(a.hi, b.hi)));
    return Interval(l, h);
}
inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }

inline Interval abs(const Interval& a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return -a;
    return Interval(0.0, std::max(-a.lo, a.hi));
}
inline Interval sqr(const Interval& a) {
    Interval m = abs(a);
    return Interval(rnd::mul_dn(m.lo, m.lo), rnd::mul_up(m.hi, m.hi));
}
Interval pow(const Interval& a, int n);
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
// enclosure of e^x for a single binary64 x
Interval exp_point(double x);

// upper bounds for common nonnegative sums
inline double up_add(double a, double b) { return rnd::add_up(a, b); }
inline double up_mul(double a, double b) { return rnd::mul_up(a, b); }
inline double up_div(double a, double b) { return rnd::div_up(a, b); }

// tight enclosure of a decimal literal
Interval from_decimal(const std::string& s);
// outward decimal strings; parse back to the same binary64
std::string decimal_down(double x);
std::string decimal_up(double x);
std::pair<std::string, std::string> to_strings(const Interval& a);

using IVector = std::vector<Interval>;

class IMatrix {
public:
    IMatrix() = default;
    IMatrix(int r, int c) : r_(r), c_(c), a_(static_cast<size_t>(r) * c) {}
    IMatrix(int r, int c, const Interval& fill) : r_(r), c_(c), a_(static_cast<size_t>(r) * c, fill) {}

    static IMatrix identity(int n);
    static IMatrix from(const Eigen::MatrixXd& m);

    int rows() const { return r_; }
    int cols() const { return c_; }
    Interval& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const Interval& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    Eigen::MatrixXd mid() const;
    Eigen::MatrixXd mag() const;
    Eigen::MatrixXd upper() const;
    IVector col(int j) const;
    void set_col(int j, const IVector& v);
    IMatrix transpose() const;
    bool subset_of(const IMatrix& o) const;

private:
    int r_ = 0, c_ = 0;
    std::vector<Interval> a_;
};

IMatrix operator+(const IMatrix& a, const IMatrix& b);
IMatrix operator-(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const Eigen::MatrixXd& a, const IMatrix& b);
IMatrix operator*(const IMatrix& a, const Eigen::MatrixXd& b);
IVector operator*(const IMatrix& a, const IVector& v);
IVector operator*(const Eigen::MatrixXd& a, const IVector& v);
IVector operator+(const IVector& a, const IVector& b);
IVector operator-(const IVector& a, const IVector& b);
IMatrix hull(const IMatrix& a, const IMatrix& b);
IVector hull(const IVector& a, const IVector& b);

IVector to_ivector(const Eigen::VectorXd& v);
Eigen::VectorXd mid(const IVector& v);
bool subset_of(const IVector& a, const IVector& b);

// upper bounds of operator norms over all members
double norm_inf(const IMatrix& a);
double norm_1(const IMatrix& a);
double norm_frobenius(const IMatrix& a);
double norm_2_upper(const IMatrix& a);
double norm_2_upper(const IVector& v);
double norm_inf(const IVector& v);

// rigorous enclosure of the inverse of a point matrix
IMatrix inverse_enclosure(const Eigen::MatrixXd& a);

}  // namespace ksc
