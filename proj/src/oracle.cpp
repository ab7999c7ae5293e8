#include "ksc/oracle.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

namespace ksc::oracle {

namespace ode = boost::numeric::odeint;
using State = std::vector<double>;

namespace {

// F_k = lambda_k a_k - k sum_{n<k} a_n a_{k-n} + 2k sum_n a_n a_{n+k}
void field_raw(const Galerkin& g, const double* a, double* out) {
    const int n = g.n;
    for (int k = 1; k <= n; ++k) {
        double s1 = 0.0, s2 = 0.0;
        for (int l = 1; l < k; ++l) s1 += a[l - 1] * a[k - l - 1];
        for (int l = 1; l + k <= n; ++l) s2 += a[l - 1] * a[l + k - 1];
        out[k - 1] = g.lambda(k) * a[k - 1] - k * s1 + 2.0 * k * s2;
    }
}

struct Rhs {
    const Galerkin& g;
    void operator()(const State& x, State& dx, double) const {
        dx.resize(x.size());
        field_raw(g, x.data(), dx.data());
    }
};

// state and n columns of the variational matrix, column-major after the state
struct VarRhs {
    const Galerkin& g;
    void operator()(const State& x, State& dx, double) const {
        const int n = g.n;
        dx.resize(x.size());
        field_raw(g, x.data(), dx.data());
        Eigen::Map<const Eigen::VectorXd> a(x.data(), n);
        Eigen::MatrixXd J = g.jacobian(a);
        Eigen::Map<const Eigen::MatrixXd> V(x.data() + n, n, n);
        Eigen::Map<Eigen::MatrixXd> dV(dx.data() + n, n, n);
        dV.noalias() = J * V;
    }
};

// negative atol selects 1e-3 rtol
auto make_stepper(double rtol, double atol = -1.0) {
    return ode::make_dense_output(atol < 0 ? rtol * 1e-3 : atol, rtol, ode::runge_kutta_dopri5<State>());
}

State to_state(const Eigen::VectorXd& v) { return State(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vec(const State& s, int n) { return Eigen::Map<const Eigen::VectorXd>(s.data(), n); }

void check_finite(const State& s) {
    for (double v : s)
        if (!std::isfinite(v)) throw std::runtime_error("oracle integration diverged");
}

}  // namespace

Eigen::VectorXd Galerkin::field(const Eigen::VectorXd& a) const {
    Eigen::VectorXd x = pad(a), out(n);
    field_raw(*this, x.data(), out.data());
    return out;
}

Eigen::MatrixXd Galerkin::jacobian(const Eigen::VectorXd& a0) const {
    Eigen::VectorXd a = pad(a0);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        J(k - 1, k - 1) += lambda(k);
        for (int l = 1; l < k; ++l) J(k - 1, l - 1) -= 2.0 * k * a[k - l - 1];
        for (int l = 1; l + k <= n; ++l) {
            J(k - 1, l - 1) += 2.0 * k * a[l + k - 1];
            J(k - 1, l + k - 1) += 2.0 * k * a[l - 1];
        }
    }
    return J;
}

Eigen::VectorXd Galerkin::pad(const Eigen::VectorXd& u) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const int k = std::min<int>(n, static_cast<int>(u.size()));
    x.head(k) = u.head(k);
    return x;
}

Eigen::VectorXd galerkin_solve(const Galerkin& g, const Eigen::VectorXd& u0, double T, double rtol, double atol) {
    return galerkin_trajectory(g, u0, {T}, rtol, atol).back();
}

std::vector<Eigen::VectorXd> galerkin_trajectory(const Galerkin& g, const Eigen::VectorXd& u0,
                                                 const std::vector<double>& times, double rtol, double atol) {
    State x = to_state(g.pad(u0));
    std::vector<Eigen::VectorXd> out;
    double t = 0.0;
    for (double T : times) {
        if (T < t) throw std::invalid_argument("times must increase");
        if (T > t) ode::integrate_adaptive(make_stepper(rtol, atol), Rhs{g}, x, t, T, 1e-4);
        check_finite(x);
        t = T;
        out.push_back(to_vec(x, g.n));
    }
    return out;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> galerkin_variational(const Galerkin& g, const Eigen::VectorXd& u0,
                                                                 double T, double rtol) {
    const int n = g.n;
    State x(n + n * n, 0.0);
    Eigen::VectorXd a = g.pad(u0);
    std::copy(a.data(), a.data() + n, x.begin());
    for (int j = 0; j < n; ++j) x[n + j * n + j] = 1.0;
    if (T > 0) ode::integrate_adaptive(make_stepper(rtol), VarRhs{g}, x, 0.0, T, 1e-4);
    check_finite(x);
    return {to_vec(x, n), Eigen::Map<const Eigen::MatrixXd>(x.data() + n, n, n)};
}

ReturnPoint first_return(const Galerkin& g, const Eigen::VectorXd& u0, int coord, int orientation, double t_max,
                         double rtol) {
    if (coord < 0 || coord >= g.n) throw std::invalid_argument("section coordinate out of range");
    const double sgn = orientation >= 0 ? 1.0 : -1.0;
    auto st = make_stepper(rtol);
    st.initialize(to_state(g.pad(u0)), 0.0, 1e-4);
    bool armed = false;
    State x(g.n);
    while (st.current_time() < t_max) {
        auto [t0, t1] = st.do_step(Rhs{g});
        check_finite(st.current_state());
        double a0 = st.previous_state()[coord], a1 = st.current_state()[coord];
        if (!armed) {
            armed = sgn * a1 < 0;
            continue;
        }
        if (sgn * a0 <= 0 && sgn * a1 > 0) {
            // bisection on the dense output
            double lo = t0, hi = t1;
            for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
                double mid = 0.5 * (lo + hi);
                st.calc_state(mid, x);
                (sgn * x[coord] <= 0 ? lo : hi) = mid;
            }
            double t = 0.5 * (lo + hi);
            st.calc_state(t, x);
            return {t, to_vec(x, g.n)};
        }
    }
    throw std::runtime_error("no return before t_max");
}

Eigen::MatrixXd finite_diff_jacobian(const Map& f, const Eigen::VectorXd& x, double eps) {
    Eigen::MatrixXd J;
    for (int j = 0; j < x.size(); ++j) {
        Eigen::VectorXd p = x, q = x;
        p(j) += eps;
        q(j) -= eps;
        Eigen::VectorXd d = (f(p) - f(q)) / (2.0 * eps);
        if (j == 0) J.resize(d.size(), x.size());
        J.col(j) = d;
    }
    return J;
}

}  // namespace ksc::oracle
