#pragma once

#include "ksc/interval.hpp"

namespace ksc {

// center + frame diag(radii) (B_u x B_s), tail |a_k| <= C q^{-k}
struct HSet {
    Eigen::VectorXd center;
    Eigen::MatrixXd frame;
    int u = 0;                 // exit directions are the first u local coordinates
    Eigen::VectorXd radii;
    double C = 0.0;
    double q = 1.5;

    int dim() const { return static_cast<int>(center.size()); }
    void validate() const;
    // diag(radii)^{-1} frame^{-1} (x - center)
    IVector to_local(const IVector& x) const;
};

// Q(x, y) = sum_k q_k x_k^2 - |y|^2
struct QForm {
    Eigen::VectorXd q;

    static QForm standard(int n, int u);
    int exits() const;
};

struct ConeConstants {
    Interval a, c, d;
    bool verdict = false;
};

// image data in the local coordinates of the target set
struct CoveringImage {
    IVector whole;              // f(N)
    double C = 0.0;             // tail constant of f(N)
    std::vector<IVector> lo;    // f({x_i = -1}), i < u
    std::vector<IVector> hi;    // f({x_i = +1}), i < u
};

// affine homotopy to x -> diag(+-3) on the exit coordinates
bool check_covering(const HSet& N, const HSet& M, const CoveringImage& img);

// image of the unit box and its exit faces under x -> L x + b
CoveringImage affine_image(const IMatrix& L, const IVector& b, int u, double C = 0.0);

// derivative bounds over N, in the local frames of N and M
struct ConeDerivative {
    IMatrix fxx;
    std::vector<double> fky;   // ||f_ky||, k <= m
    double fyx = 0.0;
    double fyy = 0.0;
};

ConeConstants cone_constants(const QForm& QN, const QForm& QM, const ConeDerivative& D);

// every symmetric member of S - a I positive definite
bool positive_definite(const IMatrix& S, double a = 0.0);
// certified lower bound for the spectrum of the symmetric members
double gershgorin_lower(const IMatrix& S);

}  // namespace ksc
