#pragma once

#include "ksc/interval.hpp"

namespace ksc {

// enclosure of q^{-k}
Interval qneg(double q, int k);

// table of q^{-k} for k = 0..n, falls back to qneg beyond
class Decay {
public:
    Decay() = default;
    Decay(double q, int n);
    Interval operator()(int k) const {
        return k < static_cast<int>(t_.size()) ? t_[k] : qneg(q_, k);
    }
    double up(int k) const { return (*this)(k).hi; }
    double q() const { return q_; }

private:
    double q_ = 0.0;
    std::vector<Interval> t_;
};

// {a : a_k in head_k for k <= m, |a_k| <= C q^{-k} for k > m}
struct GeometricBound {
    IVector head;
    double C = 0.0;
    double q = 1.5;

    GeometricBound() = default;
    GeometricBound(IVector h, double c, double q_);

    static GeometricBound zero(int m, double q);
    static GeometricBound point(const Eigen::VectorXd& a, double q);

    int m() const { return static_cast<int>(head.size()); }
    Interval mode(int k) const;
    double mode_mag(int k) const;
    // a[k-1] is mode k; modes beyond a.size() are zero
    bool member(const std::vector<double>& a) const;
};

// |b_k| <= P(k) q^{-k}, P(k) = sum coef[j] k^j with coef >= 0
struct PolyGeometricBound {
    std::vector<double> coef;
    double q = 1.5;

    double eval_up(double k) const;
};

// sup_{k >= k0} P(k) d^{-k}, d > 1
double sup_poly_decay(const std::vector<double>& coef, double d, int k0);

struct GeometricTail {
    double C = 0.0;
    double q = 1.5;
};

// P(k) q^{-k} <= C' (q/delta)^{-k}
GeometricTail geometric_reduce(const PolyGeometricBound& b, double delta);
// picks delta from grid minimizing the bound at index k0
GeometricTail geometric_reduce_best(const PolyGeometricBound& b, const std::vector<double>& grid, int k0);

bool contains(const GeometricBound& outer, const GeometricBound& inner);
GeometricBound operator+(const GeometricBound& a, const GeometricBound& b);
GeometricBound operator*(const Interval& s, const GeometricBound& a);

std::string to_text(const GeometricBound& a);

}  // namespace ksc
