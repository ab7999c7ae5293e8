#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ksc/poincare.hpp"

namespace ksc {

struct RunConfig {
    std::string nu = "0.127";
    int m = 15;
    double q = 1.5;
    double tol = 1e-7;
    int order = 5;
    long max_steps = 200000;
    double head_inflation = 10.0;
    double tail_inflation = 1.25;
    double t_max = 3.0;             // bound on the return time
    bool double_return = true;      // also compare with the second return map
    std::string report;

    void validate() const;
    nlohmann::json to_json() const;
};

struct StageResult {
    std::string name;
    bool verdict = false;
    nlohmann::json bounds = nlohmann::json::object();
    double seconds = 0.0;
    std::string error;
};

struct ProofReport {
    RunConfig config;
    std::vector<StageResult> stages;
    Interval norm_bound{rnd::kInf};
    bool contraction = false;
    std::optional<GeometricBound> image;   // certified S o P(K), full coordinates

    const StageResult* stage(const std::string& name) const;
    nlohmann::json to_json() const;
};

nlohmann::json interval_json(const Interval& a);
Interval interval_from_json(const nlohmann::json& j);

// S(a_1, a_2, a_3, ...) = (-a_1, a_2, -a_3, ...)
Eigen::VectorXd symmetry(const Eigen::VectorXd& u);

// seed near the symmetric attracting orbit at nu = 0.127
Eigen::VectorXd default_seed();

struct Candidate {
    Eigen::VectorXd u;                // m modes, u_1 = 0
    double residual = 0.0;            // |S P(u) - u|_2 of the returned point
    double return_time = 0.0;
    int orientation = 1;
    std::vector<double> trace;        // residual per iteration, trace[0] for the seed
};

// fixed point of S o P for the m-mode Galerkin system by simple iteration
Candidate find_candidate(const RunConfig& cfg, const Eigen::VectorXd& seed, double tol = 1e-13, int max_iter = 300);

struct SectionFrame {
    Eigen::MatrixXd A;                // columns span the section, pivot dropped
    Eigen::MatrixXd jacobian;         // numeric D(S o P) in the same coordinates
    Eigen::VectorXcd eigenvalues;
    double condition = 0.0;
};

SectionFrame build_section_frame(const Eigen::VectorXd& u0, const RunConfig& cfg);

ProofReport certify_attracting_orbit(const RunConfig& cfg);

}  // namespace ksc
