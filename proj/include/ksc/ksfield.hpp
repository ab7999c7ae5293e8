#pragma once

#include "ksc/interval.hpp"
#include "ksc/linbound.hpp"
#include "ksc/tails.hpp"

namespace ksc {

// du_k/dt = lambda_k u_k - k sum_{n<k} u_n u_{k-n} + 2k sum_{n>=1} u_n u_{n+k},
// lambda_k = k^2 (1 - nu k^2)
struct KSField {
    Interval nu;
    int m = 0;
    double q = 1.5;
    std::vector<double> delta_grid;
    Decay dec;

    KSField(const Interval& nu_, int m_, double q_);

    Interval lambda(int k) const;
};

// bounds on the bilinear form
// Q_k(a,b) = -k sum_{n<k} a_n b_{k-n} + k sum_{n>=1} (a_n b_{n+k} + b_n a_{n+k}),
// so that N(u) = Q(u,u) and DN(u)v = 2Q(u,v)
struct QuadBound {
    int m = 0;
    IVector val;                // k = 1..2m, pairs of explicit modes only
    std::vector<double> slack;  // k = 1..2m, pairs touching a tail mode
    double c1 = 0.0, c2 = 0.0;  // k > 2m: |Q_k| <= (c1 k + c2 k^2) q^{-k}

    Interval at(int k) const { return val[k - 1] + Interval::sym(slack[k - 1]); }
    double mag(int k, const Decay& d) const;
    // sup_{k>m} |Q_k| q^k / |lambda_k| and the matching far-index constant
};

QuadBound bilinear(const KSField& f, const GeometricBound& a, const GeometricBound& b);

struct FieldEnclosure {
    IVector head;
    PolyGeometricBound tail;  // |F_k| <= P(k) q^{-k}, k > m
    GeometricTail reduced;    // same tail after geometric_reduce
};

FieldEnclosure eval_field(const KSField& f, const GeometricBound& u);
// sup_{k>m} |F_k(u)|
double field_tail_sup(const KSField& f, const GeometricBound& u);

Interval partial_derivative(const KSField& f, int i, int k, const GeometricBound& z);

struct BlockNorms {
    IMatrix Axx;
    std::vector<double> row_y;  // sum_{j>m} |dF_i/dz_j|, i <= m
    std::vector<double> col_y;  // sup_{j>m} |dF_j/dz_k|, k <= m
    double mu_yy = 0.0;         // logarithmic norm of the tail block
};

BlockNorms derivative_block_norms(const KSField& f, const GeometricBound& E);
JMatrix build_J(const KSField& f, const GeometricBound& E);

struct IsolationConstants {
    int K = 0;
    double l = 0.0;
    double A = 0.0;
};

// lambda_k + k(k-1)S + 2kS/(q^2-1); isolation at index k iff negative
Interval isolation_value(const KSField& f, int k, double S);
Interval lognorm_row(const KSField& f, int i, double S);
Interval lognorm_row_var(const KSField& f, int i, double S, double Sc);
IsolationConstants isolation_and_lognorm_constants(const KSField& f, double S, double Sc);

GeometricBound apply_symmetry(const GeometricBound& u);

// m-mode Galerkin pieces
IVector galerkin_quad(const IVector& a, const IVector& b);
// matrix of b -> 2 Q(a, b)
IMatrix galerkin_dn(const IVector& a);
Eigen::MatrixXd galerkin_dn_abs(const IVector& a);
IVector galerkin_field(const KSField& f, const IVector& x);

}  // namespace ksc
