#pragma once

#include "ksc/ksfield.hpp"
#include "ksc/linbound.hpp"
#include "ksc/tails.hpp"

namespace ksc {

// mid + C R + B R0
struct Doubleton {
    Eigen::VectorXd mid;
    Eigen::MatrixXd C;
    IVector R;
    Eigen::MatrixXd B;
    IVector R0;

    static Doubleton box(const IVector& x);
    static Doubleton affine(const Eigen::VectorXd& center, const Eigen::MatrixXd& C, const IVector& R);
    int dim() const { return static_cast<int>(mid.size()); }
    IVector hull() const;
};

struct C0State {
    Doubleton x;
    double C = 0.0;  // tail: |u_k| <= C q^{-k}, k > m
    double q = 1.5;
    double t = 0.0;

    int m() const { return x.dim(); }
    GeometricBound set() const { return GeometricBound(x.hull(), C, q); }
};

struct EnclosureResult {
    GeometricBound E;
    double h = 0.0;
};

struct C0Options {
    int order = 5;
    double tol = 1e-7;
    double kappa = 0.5;        // |lambda_m| h <= kappa
    double h_max = 0.05;
    double grid = 0x1p-40;     // step sizes are multiples of this
    int max_inflate = 20;
    int max_halve = 40;
    long max_steps = 1000000;  // per integrate / crossing call
};

// per-step data reused by the variational step
struct StepRecord {
    double t0 = 0.0, h = 0.0;
    GeometricBound E;
    IVector X0;                 // hull of the state at t0
    IMatrix T;                  // Galerkin transition over X0
    std::vector<IVector> jetsX; // Galerkin jets on X0
    QuadBound NE;               // bilinear(E, E)
    JMatrix J;
    IMatrix G;                  // e^{J [0,h]} upper bound
    std::vector<double> ehat;   // explicit-mode slack from the tail
};

struct TraceEntry {
    double t0 = 0.0, h = 0.0;
    GeometricBound E;
};

// Taylor coefficients x[0..order] of the m-mode Galerkin flow
std::vector<IVector> field_jets(const KSField& f, const IVector& x0, int order);
// Taylor coefficients W[0..order] of the variational flow along the jets xj
std::vector<IMatrix> variational_jets(const KSField& f, const std::vector<IVector>& xj, const IMatrix& W0, int order);

class C0Integrator {
public:
    C0Integrator(const KSField& f, const C0Options& opt) : f_(f), opt_(opt) {}

    const KSField& field() const { return f_; }
    const C0Options& options() const { return opt_; }

    double floor_grid(double h) const;
    double suggest_step(const C0State& s, double h_prev) const;

    // candidate check: returns refined set, or false when E is not self-consistent
    bool validate(const C0State& s, const GeometricBound& E, double h, GeometricBound& out) const;
    EnclosureResult rough_enclosure(const C0State& s, double h0) const;
    C0State step(const C0State& s, const EnclosureResult& enc, StepRecord* rec = nullptr) const;
    // e^{lambda_k h} C0 + b_k q^k (1 - e^{lambda_k h})/|lambda_k|, sup over k > m
    double tail_after(const QuadBound& nb, double C0, double h, double factor = 1.0) const;
    // sup over k > m of factor * b_k q^k / |lambda_k|
    double tail_target(const QuadBound& nb, double factor = 1.0) const;

    // advances to the absolute time T >= s.t
    C0State integrate(const C0State& s, double T, std::vector<TraceEntry>* trace = nullptr) const;

private:
    KSField f_;
    C0Options opt_;
};

}  // namespace ksc
