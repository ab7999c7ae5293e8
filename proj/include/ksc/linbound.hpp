#pragma once

#include "ksc/interval.hpp"

namespace ksc {

// Metzler comparison matrix: off-diagonal lower bounds >= 0
using JMatrix = IMatrix;

bool is_metzler(const IMatrix& J);

// max_i (A_ii + sum_{k != i} |A_ik|) over all members
Interval log_norm_max(const IMatrix& A);

// componentwise upper enclosure of e^{J s}, s in t, for every member of J
IMatrix expm_upper(const JMatrix& J, const Interval& t, int order = 20);

// e^{lt} d0 + delta (e^{lt} - 1)/l, upper bound
double defect_bound(double l, double delta, double d0, double t);

std::vector<double> propagate_norm_vector(const JMatrix& J, const Interval& t, const std::vector<double>& z);
// same with a precomputed exponential bound
std::vector<double> apply_upper(const IMatrix& G, const std::vector<double>& z);

}  // namespace ksc
