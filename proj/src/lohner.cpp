#include "ksc/lohner.hpp"

namespace ksc {

MatDoubleton MatDoubleton::identity(int n) {
    MatDoubleton v;
    v.D = Eigen::MatrixXd::Identity(n, n);
    v.C = Eigen::MatrixXd::Identity(n, n);
    v.B = Eigen::MatrixXd::Identity(n, n);
    v.R = IMatrix(n, n, Interval(0.0));
    v.R0 = IMatrix(n, n, Interval(0.0));
    return v;
}

IMatrix MatDoubleton::hull() const { return IMatrix::from(D) + C * R + B * R0; }

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    if (!Q.allFinite()) return Eigen::MatrixXd::Identity(n, n);
    return Q;
}

Doubleton lohner_update(const Doubleton& x, const IMatrix& T, const IVector& Y0) {
    const int n = x.dim();
    Doubleton out;
    out.mid = mid(Y0);
    IVector rest = Y0 - to_ivector(out.mid);
    out.R = x.R;
    if (x.C.cols() > 0) {
        IMatrix TC = T * x.C;
        out.C = TC.mid();
        rest = rest + (TC - IMatrix::from(out.C)) * x.R;
    } else {
        out.C = Eigen::MatrixXd::Zero(n, 0);
    }
    IMatrix TB = T * x.B;
    out.B = orthonormalize(TB.mid());
    IMatrix Binv = inverse_enclosure(out.B);
    out.R0 = (Binv * TB) * x.R0 + Binv * rest;
    return out;
}

MatDoubleton lohner_update(const MatDoubleton& V, const IMatrix& T, const IMatrix& add) {
    MatDoubleton out;
    IMatrix Y = T * V.D + add;
    out.D = Y.mid();
    IMatrix TC = T * V.C;
    out.C = TC.mid();
    IMatrix TB = T * V.B;
    out.B = orthonormalize(TB.mid());
    IMatrix Binv = inverse_enclosure(out.B);
    IMatrix rest = (TC - IMatrix::from(out.C)) * V.R + (Y - IMatrix::from(out.D));
    out.R = V.R;
    out.R0 = (Binv * TB) * V.R0 + Binv * rest;
    return out;
}

}  // namespace ksc
