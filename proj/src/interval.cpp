#include "ksc/interval.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdlib>
#include <cctype>

namespace ksc {

namespace {

using boost::multiprecision::cpp_int;

double pow_dn_nonneg(double x, int n) {
    double r = 1.0, b = x;
    while (n > 0) {
        if (n & 1) r = rnd::mul_dn(r, b);
        n >>= 1;
        if (n) b = rnd::mul_dn(b, b);
    }
    return r;
}
double pow_up_nonneg(double x, int n) {
    double r = 1.0, b = x;
    while (n > 0) {
        if (n & 1) r = rnd::mul_up(r, b);
        n >>= 1;
        if (n) b = rnd::mul_up(b, b);
    }
    return r;
}

Interval taylor_exp(const Interval& r, int order) {
    Interval s(1.0), term(1.0);
    for (int n = 1; n <= order; ++n) {
        term = term * r / Interval(static_cast<double>(n));
        s += term;
    }
    // |r| <= 1: remainder below e * |r|^(N+1)/(N+1)!
    double f = 3.0;
    for (int n = 2; n <= order + 1; ++n) f = rnd::div_up(f, n);
    double rm = r.mag();
    for (int n = 0; n <= order; ++n) f = rnd::mul_up(f, std::max(rm, 1.0));
    return s + Interval::sym(f);
}

const Interval& euler() {
    static const Interval e = taylor_exp(Interval(1.0), 24);
    return e;
}

// x = d * 10^e10 exactly (d >= 0), sign separately
void exact_decimal(double x, cpp_int& d, int& e10) {
    int e2;
    double m = std::frexp(std::fabs(x), &e2);
    auto mant = static_cast<long long>(std::ldexp(m, 53));
    e2 -= 53;
    d = mant;
    e10 = 0;
    if (e2 >= 0) {
        d <<= e2;
    } else {
        cpp_int five = 1;
        for (int i = 0; i < -e2; ++i) five *= 5;
        d *= five;
        e10 = e2;
    }
}

cpp_int pow10(int k) {
    cpp_int r = 1;
    for (int i = 0; i < k; ++i) r *= 10;
    return r;
}

// away = true rounds the magnitude up
std::string format_decimal(double x, bool away) {
    if (x == 0) return "0";
    if (!std::isfinite(x)) return x > 0 ? "inf" : "-inf";
    cpp_int d;
    int e10;
    exact_decimal(x, d, e10);
    std::string s = d.str();
    const int keep = 25;
    if (static_cast<int>(s.size()) > keep) {
        int drop = static_cast<int>(s.size()) - keep;
        cpp_int p = pow10(drop);
        cpp_int q = d / p;
        if (away && q * p != d) q += 1;
        d = q;
        e10 += drop;
        s = d.str();
    }
    while (s.size() > 1 && s.back() == '0') {
        s.pop_back();
        ++e10;
    }
    int exp10 = e10 + static_cast<int>(s.size()) - 1;
    std::string out = x < 0 ? "-" : "";
    out += s[0];
    if (s.size() > 1) {
        out += '.';
        out += s.substr(1);
    }
    out += 'e';
    out += std::to_string(exp10);
    return out;
}

// parse [+-]digits[.digits][e[+-]digits] into sign, mantissa, exponent
bool parse_decimal(const std::string& str, int& sign, cpp_int& mant, int& e10) {
    size_t i = 0;
    sign = 1;
    while (i < str.size() && std::isspace(static_cast<unsigned char>(str[i]))) ++i;
    if (i < str.size() && (str[i] == '+' || str[i] == '-')) {
        if (str[i] == '-') sign = -1;
        ++i;
    }
    mant = 0;
    e10 = 0;
    bool any = false;
    while (i < str.size() && std::isdigit(static_cast<unsigned char>(str[i]))) {
        mant = mant * 10 + (str[i] - '0');
        ++i;
        any = true;
    }
    if (i < str.size() && str[i] == '.') {
        ++i;
        while (i < str.size() && std::isdigit(static_cast<unsigned char>(str[i]))) {
            mant = mant * 10 + (str[i] - '0');
            --e10;
            ++i;
            any = true;
        }
    }
    if (!any) return false;
    if (i < str.size() && (str[i] == 'e' || str[i] == 'E')) {
        ++i;
        int es = 1, ev = 0;
        if (i < str.size() && (str[i] == '+' || str[i] == '-')) {
            if (str[i] == '-') es = -1;
            ++i;
        }
        bool digits = false;
        while (i < str.size() && std::isdigit(static_cast<unsigned char>(str[i]))) {
            ev = ev * 10 + (str[i] - '0');
            ++i;
            digits = true;
        }
        if (!digits) return false;
        e10 += es * ev;
    }
    while (i < str.size() && std::isspace(static_cast<unsigned char>(str[i]))) ++i;
    return i == str.size();
}

// sign of (sign*mant*10^e10 - x)
int compare_decimal(int sign, const cpp_int& mant, int e10, double x) {
    if (mant == 0 && x == 0) return 0;
    cpp_int d;
    int xe;
    exact_decimal(x, d, xe);
    int xs = x < 0 ? -1 : (x > 0 ? 1 : 0);
    int ds = mant == 0 ? 0 : sign;
    if (ds != xs) return ds < xs ? -1 : 1;
    cpp_int a = mant, b = d;
    int lo = std::min(e10, xe);
    a *= pow10(e10 - lo);
    b *= pow10(xe - lo);
    int c = a < b ? -1 : (a > b ? 1 : 0);
    return ds * c;
}

}  // namespace

Interval pow(const Interval& a, int n) {
    if (n == 0) return Interval(1.0);
    if (n < 0) return Interval(1.0) / pow(a, -n);
    if (n % 2 == 0) {
        Interval m = abs(a);
        return Interval(pow_dn_nonneg(m.lo, n), pow_up_nonneg(m.hi, n));
    }
    double l = a.lo >= 0 ? pow_dn_nonneg(a.lo, n) : -pow_up_nonneg(-a.lo, n);
    double h = a.hi >= 0 ? pow_up_nonneg(a.hi, n) : -pow_dn_nonneg(-a.hi, n);
    return Interval(l, h);
}

Interval sqrt(const Interval& a) {
    if (a.lo < 0) throw std::domain_error("sqrt of negative-straddling interval");
    return Interval(rnd::sqrt_dn(a.lo), rnd::sqrt_up(a.hi));
}

Interval exp_point(double x) {
    if (x == 0) return Interval(1.0);
    if (std::isnan(x)) throw std::domain_error("exp of nan");
    if (x < -740.0) return Interval(0.0, std::numeric_limits<double>::denorm_min());
    if (x > 709.0) throw std::overflow_error("exp overflow");
    double k = std::floor(x);
    Interval r = Interval(x) - Interval(k);
    Interval er = taylor_exp(r, 20);
    int ik = static_cast<int>(k);
    Interval ek = ik >= 0 ? pow(euler(), ik) : Interval(1.0) / pow(euler(), -ik);
    Interval v = ek * er;
    return Interval(std::max(0.0, v.lo), v.hi);
}

Interval exp(const Interval& a) {
    if (a.is_point()) return exp_point(a.lo);
    return Interval(exp_point(a.lo).lo, exp_point(a.hi).hi);
}

Interval from_decimal(const std::string& s) {
    int sign;
    cpp_int mant;
    int e10;
    if (!parse_decimal(s, sign, mant, e10)) throw std::invalid_argument("not a decimal number: " + s);
    double x = std::strtod(s.c_str(), nullptr);
    int c = compare_decimal(sign, mant, e10, x);
    if (c == 0) return Interval(x);
    if (c < 0) return Interval(rnd::pred(x), x);
    return Interval(x, rnd::succ(x));
}

std::string decimal_down(double x) { return format_decimal(x, x < 0); }
std::string decimal_up(double x) { return format_decimal(x, x > 0); }

std::pair<std::string, std::string> to_strings(const Interval& a) {
    return {decimal_down(a.lo), decimal_up(a.hi)};
}

IMatrix IMatrix::identity(int n) {
    IMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Interval(1.0);
    return m;
}

IMatrix IMatrix::from(const Eigen::MatrixXd& m) {
    IMatrix r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j) r(i, j) = Interval(m(i, j));
    return r;
}

Eigen::MatrixXd IMatrix::mid() const {
    Eigen::MatrixXd m(r_, c_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) m(i, j) = (*this)(i, j).mid();
    return m;
}

Eigen::MatrixXd IMatrix::mag() const {
    Eigen::MatrixXd m(r_, c_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) m(i, j) = (*this)(i, j).mag();
    return m;
}

Eigen::MatrixXd IMatrix::upper() const {
    Eigen::MatrixXd m(r_, c_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) m(i, j) = (*this)(i, j).hi;
    return m;
}

IVector IMatrix::col(int j) const {
    IVector v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
}

void IMatrix::set_col(int j, const IVector& v) {
    for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
}

IMatrix IMatrix::transpose() const {
    IMatrix t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool IMatrix::subset_of(const IMatrix& o) const {
    if (r_ != o.r_ || c_ != o.c_) return false;
    for (size_t k = 0; k < a_.size(); ++k)
        if (!a_[k].subset_of(o.a_[k])) return false;
    return true;
}

static void check_dims(bool ok) {
    if (!ok) throw std::invalid_argument("dimension mismatch");
}

IMatrix operator+(const IMatrix& a, const IMatrix& b) {
    check_dims(a.rows() == b.rows() && a.cols() == b.cols());
    IMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

IMatrix operator-(const IMatrix& a, const IMatrix& b) {
    check_dims(a.rows() == b.rows() && a.cols() == b.cols());
    IMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

namespace {

IMatrix mul_naive(const IMatrix& a, const IMatrix& b) {
    IMatrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            Interval s(0.0);
            for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

// mid/rad split with rad rounded up; false if anything is not finite
bool split(const IMatrix& a, Eigen::MatrixXd& m, Eigen::MatrixXd& r) {
    m.resize(a.rows(), a.cols());
    r.resize(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const Interval& x = a(i, j);
            if (!std::isfinite(x.lo) || !std::isfinite(x.hi)) return false;
            m(i, j) = x.mid();
            r(i, j) = x.rad();
        }
    return m.allFinite() && r.allFinite();
}

// gamma_n = n u / (1 - n u), rounded up
double gamma_up(int n) {
    const double nu = up_mul(static_cast<double>(n), 0x1p-53);
    return up_div(nu, rnd::sub_dn(1.0, nu));
}

}  // namespace

// midpoint-radius product; the floating point products are bounded a posteriori
IMatrix operator*(const IMatrix& a, const IMatrix& b) {
    check_dims(a.cols() == b.rows());
    const int n = a.cols();
    Eigen::MatrixXd am, ar, bm, br;
    if (n == 0 || !split(a, am, ar) || !split(b, bm, br)) return mul_naive(a, b);
    Eigen::MatrixXd bs(br.rows(), br.cols());
    for (int i = 0; i < bs.rows(); ++i)
        for (int j = 0; j < bs.cols(); ++j) bs(i, j) = rnd::add_up(std::fabs(bm(i, j)), br(i, j));
    Eigen::MatrixXd aa = am.cwiseAbs();
    Eigen::MatrixXd cm = am * bm;
    Eigen::MatrixXd P = aa * bm.cwiseAbs();
    Eigen::MatrixXd Q = aa * br + ar * bs;
    if (!cm.allFinite() || !P.allFinite() || !Q.allFinite()) return mul_naive(a, b);
    const double eta = std::numeric_limits<double>::denorm_min();
    const double g1 = gamma_up(n), g2 = gamma_up(2 * n + 2);
    const double d1 = rnd::sub_dn(1.0, g1), d2 = rnd::sub_dn(1.0, g2);
    const double e1 = up_mul(n + 2.0, eta), e2 = up_mul(2.0 * n + 4.0, eta);
    IMatrix r(a.rows(), b.cols());
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j) {
            double pu = up_div(up_add(P(i, j), e1), d1);
            double qu = up_div(up_add(Q(i, j), e2), d2);
            double rad = up_add(up_add(qu, up_mul(g1, pu)), e1);
            r(i, j) = Interval(rnd::sub_dn(cm(i, j), rad), rnd::add_up(cm(i, j), rad));
        }
    return r;
}

IMatrix operator*(const Eigen::MatrixXd& a, const IMatrix& b) { return IMatrix::from(a) * b; }
IMatrix operator*(const IMatrix& a, const Eigen::MatrixXd& b) { return a * IMatrix::from(b); }

IVector operator*(const IMatrix& a, const IVector& v) {
    check_dims(a.cols() == static_cast<int>(v.size()));
    IVector r(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        Interval s(0.0);
        for (int k = 0; k < a.cols(); ++k) s += a(i, k) * v[k];
        r[i] = s;
    }
    return r;
}

IVector operator*(const Eigen::MatrixXd& a, const IVector& v) {
    check_dims(a.cols() == static_cast<long>(v.size()));
    IVector r(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        Interval s(0.0);
        for (int k = 0; k < a.cols(); ++k) s += Interval(a(i, k)) * v[k];
        r[i] = s;
    }
    return r;
}

IVector operator+(const IVector& a, const IVector& b) {
    check_dims(a.size() == b.size());
    IVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

IVector operator-(const IVector& a, const IVector& b) {
    check_dims(a.size() == b.size());
    IVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

IMatrix hull(const IMatrix& a, const IMatrix& b) {
    check_dims(a.rows() == b.rows() && a.cols() == b.cols());
    IMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = hull(a(i, j), b(i, j));
    return r;
}

IVector hull(const IVector& a, const IVector& b) {
    check_dims(a.size() == b.size());
    IVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
    return r;
}

IVector to_ivector(const Eigen::VectorXd& v) {
    IVector r(v.size());
    for (int i = 0; i < v.size(); ++i) r[i] = Interval(v(i));
    return r;
}

Eigen::VectorXd mid(const IVector& v) {
    Eigen::VectorXd r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r(i) = v[i].mid();
    return r;
}

bool subset_of(const IVector& a, const IVector& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!a[i].subset_of(b[i])) return false;
    return true;
}

double norm_inf(const IMatrix& a) {
    double best = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s = up_add(s, a(i, j).mag());
        best = std::max(best, s);
    }
    return best;
}

double norm_1(const IMatrix& a) { return norm_inf(a.transpose()); }

double norm_frobenius(const IMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            double m = a(i, j).mag();
            s = up_add(s, up_mul(m, m));
        }
    return rnd::sqrt_up(s);
}

double norm_2_upper(const IMatrix& a) {
    double g = rnd::sqrt_up(up_mul(norm_1(a), norm_inf(a)));
    return std::min(g, norm_frobenius(a));
}

double norm_2_upper(const IVector& v) {
    double s = 0.0;
    for (const auto& x : v) s = up_add(s, up_mul(x.mag(), x.mag()));
    return rnd::sqrt_up(s);
}

double norm_inf(const IVector& v) {
    double s = 0.0;
    for (const auto& x : v) s = std::max(s, x.mag());
    return s;
}

IMatrix inverse_enclosure(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("dimension mismatch");
    const int n = static_cast<int>(a.rows());
    // signed permutations invert exactly
    bool perm = true;
    for (int i = 0; i < n && perm; ++i) {
        int nz = 0;
        for (int j = 0; j < n; ++j) {
            if (a(i, j) == 0) continue;
            if (std::fabs(a(i, j)) != 1.0) perm = false;
            ++nz;
        }
        if (nz != 1) perm = false;
    }
    if (perm && (a.cwiseAbs().colwise().sum().array() == 1.0).all()) return IMatrix::from(a.transpose());
    Eigen::MatrixXd r = a.partialPivLu().inverse();
    if (!r.allFinite()) throw std::domain_error("singular matrix");
    IMatrix ir = IMatrix::from(r);
    IMatrix e = IMatrix::identity(n) - ir * IMatrix::from(a);
    double eps = norm_inf(e);
    if (!(eps < 0.5)) throw std::domain_error("singular matrix");
    // (I - E)^{-1} R = (I + E + E^2 + ...) R
    IMatrix x = (IMatrix::identity(n) + e) * ir;
    double eta = up_div(up_mul(up_mul(eps, eps), norm_inf(ir)), rnd::sub_dn(1.0, eps));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) += Interval::sym(eta);
    return x;
}

}  // namespace ksc
