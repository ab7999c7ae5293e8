#pragma once

#include "ksc/c1.hpp"

namespace ksc {

// alpha(x) = n . x + c on the explicit modes; crossings counted where sign(alpha') == orientation
struct Section {
    Eigen::VectorXd n;
    double c = 0.0;
    int orientation = 1;
    int pivot = 0;  // coordinate re-solved from alpha = 0

    static Section coordinate(int m, int k, int orientation);
    Interval eval(const IVector& x) const;
    Interval eval(const Doubleton& x) const;
    Interval derivative(const IVector& Fx) const;
    // x = Emb xi + e0, xi the non-pivot coordinates
    IMatrix embedding() const;
    IVector offset() const;
};

struct Crossing {
    C0State before;          // state at t* (close to the section)
    EnclosureResult enc;     // rough enclosure valid around t*
    double t_star = 0.0;
    Interval tau;            // crossing at t* + tau
    Interval T;              // return time
    IVector Fx;              // explicit field over enc.E
    Interval dalpha;         // alpha' over enc.E
    Eigen::VectorXd rho_hat;
    IMatrix L;               // I - rho_hat n^T
    IVector shift;           // -rho_hat c
    IVector err;             // -([rho] - rho_hat) alpha(x*)
    double C = 0.0;          // tail constant at the crossing

    // hull of M P + o, using the doubleton structure at t*
    IVector image(const IMatrix& M, const IVector& o) const;
    // projected set in section coordinates
    IVector section_hull(const Section& s) const;
    // doubleton on the section (pivot re-embedded)
    C0State on_section(const Section& s) const;
};

// flow data at the crossing needed for DP
struct CrossingC1 {
    IMatrix Vxx;             // explicit block of V at the crossing
    std::vector<double> C;   // V_yx column constants
    std::vector<double> z;   // far-block bounds
    double D = 0.0;          // sup_{k>m} |F_k| over the crossing enclosure
};

// runs until the set has crossed the section with the requested orientation
Crossing cross_section(const C0Integrator& I, const C0State& s0, const Section& sec, double t_max);
Crossing cross_section(const C1Integrator& I, const C0State& s0, const C1Frame& V0, const Section& sec,
                       double t_max, CrossingC1& dv);

struct ReturnTimeDerivative {
    Interval g;
    IVector dT;              // dT/dx_j, j <= m
    double tail = 0.0;       // sum_{j>m} |dT/dx_j|
};

ReturnTimeDerivative return_time_derivative(const Section& sec, const IMatrix& Vxx, const std::vector<double>& z,
                                            const IVector& Fx);

struct DPBlocks {
    IMatrix Pxx;
    std::vector<double> Pxy;     // row norms ||P_iy||, i <= m
    std::vector<double> Pyx_col; // sup_{i>m} |P_ij| per explicit column j
    double Pyy = 0.0;
    Interval T;
    Interval g;

    double Pyx() const;          // operator norm bound, x in l2, y in sup norm
};

DPBlocks poincare_derivative_blocks(const Section& sec, const CrossingC1& dv, const IVector& Fx, const Interval& T,
                                    double q);
// DP on the tangent space of the section, rows without the pivot
DPBlocks restrict_to_section(const DPBlocks& P, const Section& sec);
// left multiplication by the symmetry
DPBlocks apply_symmetry(const DPBlocks& P);

struct FrameNorms {
    IMatrix Mxx;
    std::vector<double> Mxy;
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
    double total() const;
};

// A^{-1} P A on the explicit block, identity on the tail
FrameNorms change_frame(const DPBlocks& P, const Eigen::MatrixXd& A);

C0State apply_symmetry(const C0State& s);

}  // namespace ksc
