#include <doctest.h>

#include "iglearn/lp.hpp"
#include "support.hpp"

using namespace iglearn;

namespace {

// Solves the square system M y = r by Gaussian elimination; false if singular.
bool solve_square(std::vector<Vec> M, Vec r, Vec& y) {
  const int n = static_cast<int>(r.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(M[i][c]) > std::abs(M[piv][c])) piv = i;
    if (std::abs(M[piv][c]) < 1e-10) return false;
    std::swap(M[piv], M[c]);
    std::swap(r[piv], r[c]);
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = M[i][c] / M[c][c];
      for (int k = c; k < n; ++k) M[i][k] -= f * M[c][k];
      r[i] -= f * r[c];
    }
  }
  y.resize(n);
  for (int i = 0; i < n; ++i) y[i] = r[i] / M[i][i];
  return true;
}

// Best basic feasible solution by enumerating column subsets.
double vertex_optimum(const std::vector<Vec>& A, const Vec& b, const Vec& c, bool& feasible) {
  const int m = static_cast<int>(A.size()), n = static_cast<int>(c.size());
  double best = 1e300;
  feasible = false;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1) cols.push_back(j);
    std::vector<Vec> M(m, Vec(m));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) M[i][k] = A[i][cols[k]];
    Vec y;
    if (!solve_square(M, b, y)) continue;
    if (*std::min_element(y.begin(), y.end()) < -1e-9) continue;
    double obj = 0.0;
    for (int k = 0; k < m; ++k) obj += c[cols[k]] * y[k];
    feasible = true;
    best = std::min(best, obj);
  }
  return best;
}

}  // namespace

TEST_CASE("textbook program") {
  // max x1 + x2 s.t. x1 + 2x2 ≤ 4, 3x1 + x2 ≤ 6.
  const auto r = solve_lp({{1, 2, 1, 0}, {3, 1, 0, 1}}, {4, 6}, {-1, -1, 0, 0});
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(-2.8));
  CHECK(r.x[0] == doctest::Approx(1.6));
  CHECK(r.x[1] == doctest::Approx(1.2));
}

TEST_CASE("infeasible and unbounded programs") {
  CHECK(solve_lp({{1, 1}}, {-1}, {0, 0}).status == LpStatus::infeasible);
  CHECK(solve_lp({{1, -1}}, {0}, {-1, 0}).status == LpStatus::unbounded);
}

TEST_CASE("redundant equality rows") {
  const auto r = solve_lp({{1, 1, 0}, {2, 2, 0}, {0, 1, 1}}, {1, 2, 1}, {1, 2, 0});
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(1.0));
}

TEST_CASE("random programs agree with vertex enumeration") {
  Rng rng(21);
  int solved = 0;
  for (int t = 0; t < 300; ++t) {
    const int m = 1 + rng.uniform_int(3), n = m + 1 + rng.uniform_int(4);
    std::vector<Vec> A(m, Vec(n));
    Vec b(m), c(n);
    for (auto& row : A)
      for (double& a : row) a = rng.uniform(-1.0, 1.0);
    for (double& x : b) x = rng.uniform(-1.0, 1.0);
    for (double& x : c) x = rng.uniform(0.0, 1.0);  // c ≥ 0 keeps it bounded
    bool feasible;
    const double ref = vertex_optimum(A, b, c, feasible);
    const auto r = solve_lp(A, b, c);
    if (!feasible) {
      CHECK(r.status == LpStatus::infeasible);
      continue;
    }
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(ref).epsilon(1e-7));
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += A[i][j] * r.x[j];
      CHECK(std::abs(s - b[i]) <= 1e-8);
    }
    ++solved;
  }
  CHECK(solved > 50);
}
