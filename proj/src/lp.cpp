#include "iglearn/lp.hpp"

#include <cmath>

namespace iglearn {
namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-12;
constexpr int kMaxPivots = 20000;

struct Tableau {
  std::vector<Vec> rows;  // each row: coefficients followed by rhs
  std::vector<int> basis;
  int cols = 0;

  void pivot(int r, int j) {
    Vec& pr = rows[r];
    const double p = pr[j];
    for (double& v : pr) v /= p;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == r) continue;
      const double f = rows[i][j];
      if (f == 0.0) continue;
      for (int k = 0; k <= cols; ++k) rows[i][k] -= f * pr[k];
    }
    basis[r] = j;
  }

  double objective(const Vec& cost) const {
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i)
      s += cost[basis[i]] * rows[i][cols];
    return s;
  }

  // Returns false when unbounded. Only columns < allowed may enter.
  bool optimize(const Vec& cost, int allowed) {
    for (int it = 0; it < kMaxPivots; ++it) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        double rc = cost[j];
        for (int i = 0; i < static_cast<int>(rows.size()); ++i)
          rc -= cost[basis[i]] * rows[i][j];
        if (rc < -kCostEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        const double a = rows[i][enter];
        if (a <= kPivotEps) continue;
        const double ratio = rows[i][cols] / a;
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw Error("simplex pivot limit reached");
  }
};

}  // namespace

LpResult solve_lp(const std::vector<Vec>& A, const Vec& b, const Vec& c) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  Tableau t;
  t.cols = n + m;
  t.rows.assign(m, Vec(t.cols + 1, 0.0));
  t.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) t.rows[i][j] = sign * A[i][j];
    t.rows[i][n + i] = 1.0;
    t.rows[i][t.cols] = sign * b[i];
    t.basis[i] = n + i;
  }

  Vec phase1(t.cols, 0.0);
  for (int i = 0; i < m; ++i) phase1[n + i] = 1.0;
  t.optimize(phase1, t.cols);
  LpResult res;
  if (t.objective(phase1) > 1e-9) return res;

  // Drive artificial variables out of the basis; drop redundant rows.
  for (int i = 0; i < static_cast<int>(t.rows.size());) {
    if (t.basis[i] < n) {
      ++i;
      continue;
    }
    int j = 0;
    while (j < n && std::abs(t.rows[i][j]) <= kPivotEps) ++j;
    if (j < n) {
      t.pivot(i, j);
      ++i;
    } else {
      t.rows.erase(t.rows.begin() + i);
      t.basis.erase(t.basis.begin() + i);
    }
  }

  Vec phase2(t.cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = c[j];
  if (!t.optimize(phase2, n)) {
    res.status = LpStatus::unbounded;
    return res;
  }
  res.status = LpStatus::optimal;
  res.x.assign(n, 0.0);
  for (int i = 0; i < static_cast<int>(t.rows.size()); ++i)
    if (t.basis[i] < n) res.x[t.basis[i]] = t.rows[i][t.cols];
  for (int j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace iglearn
