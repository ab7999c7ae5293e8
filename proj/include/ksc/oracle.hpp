#pragma once

// Plain floating point reference computations for tests and candidate search.
// Nothing here is used by the certified code.

#include <Eigen/Dense>
#include <functional>

namespace ksc::oracle {

// n-mode Galerkin projection, a[k-1] is mode k
struct Galerkin {
    double nu = 0.127;
    int n = 40;

    double lambda(int k) const { return double(k) * k * (1.0 - nu * k * k); }
    Eigen::VectorXd field(const Eigen::VectorXd& a) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& a) const;
    Eigen::VectorXd pad(const Eigen::VectorXd& u) const;
};

// atol < 0 means 1e-3 rtol
Eigen::VectorXd galerkin_solve(const Galerkin& g, const Eigen::VectorXd& u0, double T, double rtol = 1e-10,
                               double atol = -1.0);

// states at the requested (increasing) times
std::vector<Eigen::VectorXd> galerkin_trajectory(const Galerkin& g, const Eigen::VectorXd& u0,
                                                 const std::vector<double>& times, double rtol = 1e-10,
                                                 double atol = -1.0);

// u(T) and the variational matrix du(T)/du0
std::pair<Eigen::VectorXd, Eigen::MatrixXd> galerkin_variational(const Galerkin& g, const Eigen::VectorXd& u0,
                                                                 double T, double rtol = 1e-10);

struct ReturnPoint {
    double t = 0.0;
    Eigen::VectorXd u;
};

// first time a_coord crosses 0 with sign(da_coord/dt) == orientation,
// after having been strictly on the other side
ReturnPoint first_return(const Galerkin& g, const Eigen::VectorXd& u0, int coord, int orientation, double t_max,
                         double rtol = 1e-10);

using Map = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// central differences, column j = (f(x + eps e_j) - f(x - eps e_j)) / 2eps
Eigen::MatrixXd finite_diff_jacobian(const Map& f, const Eigen::VectorXd& x, double eps);

}  // namespace ksc::oracle
