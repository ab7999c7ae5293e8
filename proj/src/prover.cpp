#include "ksc/prover.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>

#include "ksc/oracle.hpp"

namespace ksc {

using nlohmann::json;

void RunConfig::validate() const {
    Interval v = from_decimal(nu);
    if (!(v.lo > 0)) throw std::invalid_argument("nu must be positive");
    if (m < 3) throw std::invalid_argument("m must be at least 3");
    if (!(q > 1)) throw std::invalid_argument("q must exceed 1");
    if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
    if (order < 1) throw std::invalid_argument("order must be positive");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
    if (!(head_inflation > 1) || !(tail_inflation > 1)) throw std::invalid_argument("inflation factors must exceed 1");
    if (!(t_max > 0)) throw std::invalid_argument("t_max must be positive");
}

json RunConfig::to_json() const {
    return {{"nu", nu},
            {"m", m},
            {"q", q},
            {"tol", tol},
            {"order", order},
            {"max_steps", max_steps},
            {"head_inflation", head_inflation},
            {"tail_inflation", tail_inflation},
            {"t_max", t_max},
            {"double_return", double_return}};
}

json interval_json(const Interval& a) {
    auto [lo, hi] = to_strings(a);
    return {{"lo", lo}, {"hi", hi}};
}

Interval interval_from_json(const json& j) {
    auto parse = [](const std::string& s) {
        if (s == "inf") return rnd::kInf;
        if (s == "-inf") return -rnd::kInf;
        return std::strtod(s.c_str(), nullptr);
    };
    return Interval(parse(j.at("lo").get<std::string>()), parse(j.at("hi").get<std::string>()));
}

const StageResult* ProofReport::stage(const std::string& name) const {
    for (const auto& s : stages)
        if (s.name == name) return &s;
    return nullptr;
}

json ProofReport::to_json() const {
    json st = json::array();
    for (const auto& s : stages) {
        json e = {{"name", s.name}, {"verdict", s.verdict}, {"bounds", s.bounds}, {"seconds", s.seconds}};
        if (!s.error.empty()) e["error"] = s.error;
        st.push_back(e);
    }
    return {{"config", config.to_json()},
            {"stages", st},
            {"norm_bound", interval_json(norm_bound)},
            {"contraction", contraction}};
}

Eigen::VectorXd symmetry(const Eigen::VectorXd& u) {
    Eigen::VectorXd r = u;
    for (int k = 0; k < r.size(); k += 2) r(k) = -r(k);
    return r;
}

Eigen::VectorXd default_seed() {
    Eigen::VectorXd u(18);
    u << 0.0, 1.1655388447652766, 5.7913642084409762e-1, -2.768914122643753e-1, -1.2582912341558827e-1,
        1.3015613792264165e-2, 1.6757421753649995e-2, 7.3178705708507339e-4, -1.4755994209479948e-3,
        -2.5601313918591901e-4, 9.5427473299718919e-5, 3.2627521780891864e-5, -3.7164835203789059e-6,
        -2.9884428114398931e-6, -6.6059155560432874e-8, 2.1596485662114442e-7, 2.9759304684536878e-8,
        -1.2262214633625861e-8;
    return u;
}

namespace {

constexpr double kOracleRtol = 1e-13;

oracle::Galerkin galerkin(const RunConfig& cfg) { return {std::strtod(cfg.nu.c_str(), nullptr), cfg.m}; }

int orientation_at(const oracle::Galerkin& g, const Eigen::VectorXd& u) {
    double f1 = g.field(u)(0);
    if (f1 == 0) throw std::runtime_error("candidate is not transversal to the section");
    // the return happens at S u, where the first component of the field has the opposite sign
    return f1 > 0 ? -1 : 1;
}

Eigen::VectorXd drop_first(const Eigen::VectorXd& u) { return u.tail(u.size() - 1); }

Eigen::VectorXd embed(const Eigen::VectorXd& xi) {
    Eigen::VectorXd u(xi.size() + 1);
    u(0) = 0.0;
    u.tail(xi.size()) = xi;
    return u;
}

Eigen::VectorXd sp_map(const oracle::Galerkin& g, const Eigen::VectorXd& u, int orient, double t_max) {
    auto r = oracle::first_return(g, u, 0, orient, t_max, kOracleRtol);
    Eigen::VectorXd v = symmetry(r.u);
    v(0) = 0.0;
    return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json vec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(decimal_up(x));
    return a;
}

}  // namespace

Candidate find_candidate(const RunConfig& cfg, const Eigen::VectorXd& seed, double tol, int max_iter) {
    oracle::Galerkin g = galerkin(cfg);
    Candidate c;
    c.u = g.pad(seed);
    c.u(0) = 0.0;
    c.orientation = orientation_at(g, c.u);
    for (int it = 0;; ++it) {
        auto r = oracle::first_return(g, c.u, 0, c.orientation, cfg.t_max, kOracleRtol);
        Eigen::VectorXd v = symmetry(r.u);
        v(0) = 0.0;
        c.residual = (v - c.u).norm();
        c.return_time = r.t;
        c.trace.push_back(c.residual);
        if (!std::isfinite(c.residual) || c.residual > 1e3) break;
        if (c.residual <= tol) return c;
        // stagnation at the integration floor
        if (it >= 20 && c.residual < 1e-10 && c.residual >= 0.9 * c.trace[it - 5]) return c;
        if (it >= max_iter) break;
        c.u = v;
    }
    std::ostringstream msg;
    msg << "candidate iteration diverged; residuals:";
    for (double r : c.trace) msg << ' ' << r;
    throw std::runtime_error(msg.str());
}

SectionFrame build_section_frame(const Eigen::VectorXd& u0, const RunConfig& cfg) {
    oracle::Galerkin g = galerkin(cfg);
    Eigen::VectorXd u = g.pad(u0);
    int orient = orientation_at(g, u);
    auto G = [&](const Eigen::VectorXd& xi) { return drop_first(sp_map(g, embed(xi), orient, cfg.t_max)); };
    SectionFrame fr;
    fr.jacobian = oracle::finite_diff_jacobian(G, drop_first(u), 1e-6);
    const int n = static_cast<int>(fr.jacobian.rows());

    Eigen::EigenSolver<Eigen::MatrixXd> es(fr.jacobian);
    Eigen::EigenSolver<Eigen::MatrixXd> lt(fr.jacobian.transpose());
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b)); });
    fr.eigenvalues.resize(n);
    for (int k = 0; k < n; ++k) fr.eigenvalues(k) = es.eigenvalues()(idx[k]);
    double top = n > 0 ? std::abs(fr.eigenvalues(0)) : 0.0;

    // dominant part from right eigenvectors, the rest spans the annihilator of the left ones
    Eigen::MatrixXd R(n, 0), L(n, 0);
    auto push = [](Eigen::MatrixXd& M, const Eigen::VectorXd& v) {
        M.conservativeResize(Eigen::NoChange, M.cols() + 1);
        M.col(M.cols() - 1) = v.normalized();
    };
    for (int k = 0; k < n; ++k) {
        int i = idx[k];
        std::complex<double> lam = fr.eigenvalues(k);
        if (!(std::abs(lam) > 1e-6 * top)) break;
        if (lam.imag() < 0) continue;  // conjugate handled with its partner
        int j = 0;
        for (int l = 1; l < n; ++l)
            if (std::abs(lt.eigenvalues()(l) - lam) < std::abs(lt.eigenvalues()(j) - lam)) j = l;
        Eigen::VectorXcd v = es.eigenvectors().col(i), w = lt.eigenvectors().col(j);
        push(R, v.real());
        push(L, w.real());
        if (lam.imag() > 0) {
            push(R, v.imag());
            push(L, w.imag());
        }
    }
    const int r = static_cast<int>(R.cols());
    fr.A.resize(n, n);
    fr.A.leftCols(r) = R;
    if (r < n) {
        Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
        if (r > 0) Q = Eigen::HouseholderQR<Eigen::MatrixXd>(L).householderQ() * Eigen::MatrixXd::Identity(n, n);
        fr.A.rightCols(n - r) = Q.rightCols(n - r);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fr.A);
    fr.condition = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (!std::isfinite(fr.condition) || fr.condition > 1e8) throw std::runtime_error("frame rejected");
    inverse_enclosure(fr.A);  // throws when not invertible
    return fr;
}

ProofReport certify_attracting_orbit(const RunConfig& cfg) {
    ProofReport rep;
    rep.config = cfg;

    auto stage = [&](const std::string& name, const std::function<void(StageResult&)>& body) {
        StageResult st;
        st.name = name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            body(st);
        } catch (const std::exception& e) {
            st.verdict = false;
            st.error = e.what();
        }
        st.seconds = seconds_since(t0);
        rep.stages.push_back(st);
        return st.verdict;
    };
    auto skip = [&](const std::string& name) {
        StageResult st;
        st.name = name;
        st.error = "skipped";
        rep.stages.push_back(st);
    };

    if (!stage("config", [&](StageResult& st) {
            cfg.validate();
            st.verdict = true;
        })) {
        for (const char* n : {"candidate", "frame", "point_image", "schauder", "derivative"}) skip(n);
        return rep;
    }

    const int m = cfg.m;
    KSField f(from_decimal(cfg.nu), m, cfg.q);
    C0Options opt;
    opt.tol = cfg.tol;
    opt.order = cfg.order;
    opt.max_steps = cfg.max_steps;
    C0Integrator I(f, opt);

    Candidate cand;
    SectionFrame fr;
    Section sec;
    IMatrix Ainv, toK, toKsym;
    IVector offset;
    Eigen::VectorXd radii;
    double CK = 0.0;
    C0State Kset;
    std::optional<Crossing> first;

    bool ok = stage("candidate", [&](StageResult& st) {
        cand = find_candidate(cfg, default_seed());
        st.bounds = {{"residual", cand.residual},
                     {"seed_residual", cand.trace.front()},
                     {"iterations", cand.trace.size()},
                     {"return_time", cand.return_time},
                     {"orientation", cand.orientation}};
        st.verdict = cand.residual < 1e-8;
    });
    ok = ok && stage("frame", [&](StageResult& st) {
        fr = build_section_frame(cand.u, cfg);
        json ev = json::array();
        for (int i = 0; i < std::min<int>(4, fr.eigenvalues.size()); ++i) ev.push_back(std::abs(fr.eigenvalues(i)));
        st.bounds = {{"condition", fr.condition}, {"leading_eigenvalue_moduli", ev}};
        st.verdict = true;
    });
    ok = ok && stage("point_image", [&](StageResult& st) {
        sec = Section::coordinate(m, 0, cand.orientation);
        Ainv = inverse_enclosure(fr.A);
        IMatrix Pi(m - 1, m, Interval(0.0));
        for (int i = 0; i < m - 1; ++i) Pi(i, i + 1) = Interval(1.0);
        IMatrix S = IMatrix::identity(m);
        for (int k = 0; k < m; k += 2) S(k, k) = Interval(-1.0);
        toK = Ainv * Pi;
        toKsym = toK * S;
        offset = IVector(m - 1, Interval(0.0)) - toK * to_ivector(cand.u);

        C0State s0;
        s0.x = Doubleton::box(to_ivector(cand.u));
        s0.q = cfg.q;
        Crossing cr = cross_section(I, s0, sec, cfg.t_max);
        IVector K0 = cr.image(toKsym, offset);
        radii.resize(m - 1);
        std::vector<double> r0(m - 1);
        for (int i = 0; i < m - 1; ++i) {
            r0[i] = K0[i].mag();
            radii(i) = up_mul(cfg.head_inflation, r0[i]);
            if (!(radii(i) > 0)) throw std::runtime_error("degenerate image width");
        }
        CK = up_mul(cfg.tail_inflation, cr.C);
        st.bounds = {{"return_time", interval_json(cr.T)},
                     {"image_radius", vec_json(r0)},
                     {"image_tail", decimal_up(cr.C)},
                     {"K_tail", decimal_up(CK)}};
        st.verdict = true;
    });
    ok = ok && stage("schauder", [&](StageResult& st) {
        Eigen::MatrixXd Emb = Eigen::MatrixXd::Zero(m, m - 1);
        Emb.bottomRows(m - 1) = fr.A;
        IVector R(m - 1);
        for (int i = 0; i < m - 1; ++i) R[i] = Interval(-radii(i), radii(i));
        Kset.x = Doubleton::affine(cand.u, Emb, R);
        Kset.C = CK;
        Kset.q = cfg.q;
        first = cross_section(I, Kset, sec, cfg.t_max);
        IVector Kt = first->image(toKsym, offset);
        double worst = 0.0;
        bool inside = true;
        for (int i = 0; i < m - 1; ++i) {
            inside = inside && Kt[i].interior_of(R[i]);
            worst = std::max(worst, up_div(Kt[i].mag(), radii(i)));
        }
        bool tail = first->C < CK;
        IMatrix Sfull = IMatrix::identity(m);
        for (int k = 0; k < m; k += 2) Sfull(k, k) = Interval(-1.0);
        rep.image = GeometricBound(first->image(Sfull, IVector(m, Interval(0.0))), first->C, cfg.q);
        st.bounds = {{"return_time", interval_json(first->T)},
                     {"head_ratio", decimal_up(worst)},
                     {"image_tail", decimal_up(first->C)},
                     {"K_tail", decimal_up(CK)}};
        st.verdict = inside && tail;
    });
    ok = ok && stage("derivative", [&](StageResult& st) {
        C1Integrator I1(I);
        CrossingC1 dv;
        Crossing cr = cross_section(I1, Kset, C1Frame::identity(m), sec, cfg.t_max, dv);
        DPBlocks P = restrict_to_section(apply_symmetry(poincare_derivative_blocks(sec, dv, cr.Fx, cr.T, cfg.q)), sec);
        FrameNorms F = change_frame(P, fr.A);
        double total = F.total();
        Interval diag0 = F.Mxx(0, 0);
        st.bounds = {{"xx", decimal_up(F.xx)},
                     {"xy", decimal_up(F.xy)},
                     {"yx", decimal_up(F.yx)},
                     {"yy", decimal_up(F.yy)},
                     {"total", decimal_up(total)},
                     {"Mxx_00", interval_json(diag0)},
                     {"return_time", interval_json(cr.T)}};
        rep.norm_bound = Interval(0.0, total);
        st.verdict = total < 1.0;
    });
    if (!ok) {
        for (const char* n : {"candidate", "frame", "point_image", "schauder", "derivative"})
            if (!rep.stage(n)) skip(n);
    }
    rep.contraction = rep.stage("schauder")->verdict && rep.stage("derivative")->verdict;

    if (cfg.double_return) {
        if (!first) {
            skip("double_return");
        } else {
            stage("double_return", [&](StageResult& st) {
                Section back = sec;
                back.orientation = -sec.orientation;
                C0State Y = first->on_section(sec);
                Crossing cr = cross_section(I, Y, back, cfg.t_max);
                IVector H2 = cr.image(toK, offset);
                IVector H1 = first->image(toKsym, offset);
                bool meet = true;
                double gap = 0.0;
                for (int i = 0; i < m - 1; ++i) {
                    Interval x;
                    meet = meet && intersect(H1[i], H2[i], x);
                    gap = std::max(gap, std::fabs(H1[i].mid() - H2[i].mid()) / radii(i));
                }
                st.bounds = {{"second_return_time", interval_json(cr.T)},
                             {"center_distance_over_radius", gap},
                             {"tail", decimal_up(cr.C)}};
                st.verdict = meet;
            });
        }
    }
    return rep;
}

}  // namespace ksc
