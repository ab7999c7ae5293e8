#pragma once

#include "ksc/c0.hpp"

namespace ksc {

// D + C R + B R0 for matrices
struct MatDoubleton {
    Eigen::MatrixXd D, C, B;
    IMatrix R, R0;

    static MatDoubleton identity(int n);
    IMatrix hull() const;
};

// orthonormal factor of a QR decomposition
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M);

// x -> T x with point image Y0 of the centre; R is kept, R0 absorbs the rest
Doubleton lohner_update(const Doubleton& x, const IMatrix& T, const IVector& Y0);
// V -> T V + add
MatDoubleton lohner_update(const MatDoubleton& V, const IMatrix& T, const IMatrix& add);

}  // namespace ksc
