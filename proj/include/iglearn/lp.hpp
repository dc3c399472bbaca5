#pragma once

#include <vector>

#include "iglearn/core.hpp"

namespace iglearn {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vec x;
  double objective = 0.0;
};

// Dense two-phase simplex with Bland's rule:
//   minimize cᵀx  subject to  A x = b,  x ≥ 0.
// Meant for the tiny programs built by the responders (tens of variables).
LpResult solve_lp(const std::vector<Vec>& A, const Vec& b, const Vec& c);

}  // namespace iglearn
