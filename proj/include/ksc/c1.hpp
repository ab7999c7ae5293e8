#pragma once

#include "ksc/c0.hpp"
#include "ksc/lohner.hpp"

namespace ksc {

// Variational matrix V in blocks:
//   V_xx  doubleton,
//   V_yx  column j bounded by |V_ij| <= C[j] q^{-i}, i > m,
//   z     z[i] >= ||(V_xy)_{i*}|| (l1 row sum) for i < m, z[m] >= ||V_yy||.
struct C1Frame {
    MatDoubleton Vxx;
    std::vector<double> C;
    std::vector<double> z;

    static C1Frame identity(int m);
    int m() const { return static_cast<int>(C.size()); }
};

// enclosure of the variational flow over one step
struct C1Enclosure {
    IMatrix W;                 // heads of the columns started from e_j (m x m)
    std::vector<double> CW;    // their tail constants
    GeometricBound Vhat;       // column started from (0, tail q^{-i}), unit constant
};

// V over the whole step, for section crossing
struct C1StepRecord {
    IMatrix Exx;               // explicit block
    std::vector<double> CE;    // tail column constants
    std::vector<double> zE;    // far-block bounds
};

class C1Integrator {
public:
    explicit C1Integrator(const C0Integrator& c0) : c0_(c0) {}

    const C0Integrator& c0() const { return c0_; }

    // enclosure of w' = L w + 2Q(u, w), u in E, over [0,h]
    bool column_enclosure(const GeometricBound& E, const GeometricBound& w0, double h, GeometricBound& out) const;

    // runs the C0 rough enclosure and the column enclosures, halving h until all succeed
    std::pair<EnclosureResult, C1Enclosure> enclosure(const C0State& s, double h0) const;
    // advances state and frame together; rec receives the C0 data, vrec the step hull of V
    std::pair<C0State, C1Frame> step(const C0State& s, const C1Frame& V, const EnclosureResult& enc,
                                     const C1Enclosure& venc, StepRecord* rec = nullptr,
                                     C1StepRecord* vrec = nullptr) const;
    std::pair<C0State, C1Frame> integrate(const C0State& s, const C1Frame& V, double T) const;

private:
    C0Integrator c0_;
};

}  // namespace ksc
