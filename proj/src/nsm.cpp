#include "iglearn/nsm.hpp"

#include <algorithm>
#include <cmath>

#include "iglearn/lp.hpp"

namespace iglearn::nsm {

namespace {

long lattice_size(int n, int m) {
  long s = 1;
  for (int i = 0; i < n; ++i) s *= m;
  return s;
}

// Advances x through {0..m−1}^n; false after the last point.
bool next_point(std::vector<int>& x, int m) {
  for (int& c : x) {
    if (++c < m) return true;
    c = 0;
  }
  return false;
}

LatticeTable rescaled(int n, int m, Vec raw) {
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double a = *lo, span = *hi - *lo;
  for (double& v : raw) v = span > 0.0 ? (v - a) / span : 0.0;
  return LatticeTable(n, m, std::move(raw));
}

// Increasing h with h(0) = 0 and h(m−1) = 1.
Vec random_ramp(int m, Rng& rng) {
  Vec h(m, 0.0);
  for (int l = 1; l < m; ++l) h[l] = h[l - 1] + rng.uniform(0.1, 1.0);
  for (double& v : h) v = m > 1 ? v / h[m - 1] : 0.0;
  return h;
}

// Item sets C_i(l) growing in l, C_i(0) = ∅.
std::vector<std::vector<sm::Mask>> nested_covers(int n, int m, int universe, Rng& rng) {
  std::vector<std::vector<sm::Mask>> c(n, std::vector<sm::Mask>(m, 0));
  for (int i = 0; i < n; ++i)
    for (int l = 1; l < m; ++l) {
      c[i][l] = c[i][l - 1];
      for (int u = 0; u < universe; ++u)
        if (rng.bernoulli(0.3)) c[i][l] |= sm::Mask{1} << u;
    }
  return c;
}

double covered_weight(sm::Mask s, const Vec& w) {
  double v = 0.0;
  while (s) {
    v += w[std::countr_zero(s)];
    s &= s - 1;
  }
  return v;
}

}  // namespace

LatticeTable::LatticeTable(int n, int m, Vec table)
    : LatticeFunction(n, m), table_(std::move(table)) {
  if (n < 1 || m < 1) throw BadParams("lattice needs n, m ≥ 1");
  if (static_cast<long>(table_.size()) != lattice_size(n, m))
    throw BadParams("lattice table has the wrong size");
  for (double v : table_)
    if (!(v >= 0.0 && v <= 1.0)) throw BadParams("lattice value outside [0, 1]");
}

double LatticeTable::at(std::span<const int> x) const {
  long idx = 0, stride = 1;
  for (int i = 0; i < n(); ++i) {
    idx += x[i] * stride;
    stride *= m();
  }
  return table_[idx];
}

nlohmann::json LatticeTable::to_json() const {
  return {{"n", n()}, {"m", m()}, {"table", table_}};
}

LatticeTable LatticeTable::from_json(const nlohmann::json& j) {
  return LatticeTable(j.at("n").get<int>(), j.at("m").get<int>(),
                      j.at("table").get<Vec>());
}

LatticeTable tabulate(const LatticeFunction& f) {
  Vec t;
  std::vector<int> x(f.n(), 0);
  do {
    t.push_back(f.at(x));
  } while (next_point(x, f.m()));
  return LatticeTable(f.n(), f.m(), std::move(t));
}

LatticeTable random_cut_plus_modular(int n, int m, Rng& rng) {
  std::vector<Vec> modular(n, Vec(m)), ramp(n);
  for (int i = 0; i < n; ++i) {
    for (double& v : modular[i]) v = rng.uniform(-1.0, 1.0);
    ramp[i] = random_ramp(m, rng);
  }
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(0.7)) edges.emplace_back(i, j, rng.uniform(0.2, 2.0));
  Vec raw;
  std::vector<int> x(n, 0);
  do {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += modular[i][x[i]];
    for (auto [i, j, w] : edges) {
      const double a = ramp[i][x[i]], b = ramp[j][x[j]];
      v += w * (a + b - 2.0 * a * b);
    }
    raw.push_back(v);
  } while (next_point(x, m));
  return rescaled(n, m, std::move(raw));
}

LatticeTable random_coverage_complement(int n, int m, Rng& rng) {
  constexpr int kUniverse = 10;
  Vec w1(kUniverse), w2(kUniverse);
  for (double& v : w1) v = rng.uniform(0.05, 1.0);
  for (double& v : w2) v = rng.uniform(0.05, 1.0);
  const auto c1 = nested_covers(n, m, kUniverse, rng);
  const auto c2 = nested_covers(n, m, kUniverse, rng);
  Vec raw;
  std::vector<int> x(n, 0);
  do {
    sm::Mask s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      s1 |= c1[i][x[i]];
      s2 |= c2[i][m - 1 - x[i]];
    }
    raw.push_back(covered_weight(s1, w1) + covered_weight(s2, w2));
  } while (next_point(x, m));
  return rescaled(n, m, std::move(raw));
}

LatticeTable rotate_coordinates(const LatticeTable& f, int shift) {
  const int n = f.n();
  Vec t;
  std::vector<int> x(n, 0), y(n);
  do {
    for (int i = 0; i < n; ++i) y[i] = x[((i + shift) % n + n) % n];
    t.push_back(f.at(y));
  } while (next_point(x, f.m()));
  return LatticeTable(n, f.m(), std::move(t));
}

SetLattice::SetLattice(std::shared_ptr<const sm::SetFunction> f)
    : LatticeFunction(f->ground_size(), 2), f_(std::move(f)) {}

double SetLattice::at(std::span<const int> x) const {
  sm::Mask s = 0;
  for (int i = 0; i < n(); ++i)
    if (x[i] == 1) s |= sm::Mask{1} << i;
  return f_->of_mask(s);
}

GridLattice::GridLattice(int n, int levels,
                         std::function<double(std::span<const double>)> f)
    : LatticeFunction(n, levels + 1), f_(std::move(f)) {}

double GridLattice::at(std::span<const int> x) const {
  Vec p(n());
  for (int i = 0; i < n(); ++i) p[i] = static_cast<double>(x[i]) / (m() - 1);
  return f_(p);
}

double submodularity_violation(const LatticeFunction& f) {
  const int n = f.n(), m = f.m();
  double worst = 0.0;
  std::vector<int> x(n, 0);
  do {
    const double fx = f.at(x);
    for (int i = 0; i < n; ++i) {
      if (x[i] + 1 >= m) continue;
      for (int j = i + 1; j < n; ++j) {
        if (x[j] + 1 >= m) continue;
        auto xi = x, xj = x, xij = x;
        ++xi[i];
        ++xj[j];
        ++xij[i];
        ++xij[j];
        worst = std::max(worst, f.at(xij) - f.at(xi) - f.at(xj) + fx);
      }
    }
  } while (next_point(x, m));
  return worst;
}

FeasiblePoint make_lattice_point(std::vector<int> idx) {
  return {AppTag::nsm, std::move(idx)};
}

FeasiblePoint upper_of(const FeasiblePoint& lower, int i, int m) {
  FeasiblePoint u = lower;
  for (std::size_t c = i; c < u.idx.size(); ++c) u.idx[c] = m - 1;
  return u;
}

Marginals nsm_marginals(const FeasiblePoint& lower, int i,
                        const ObjectiveOracle& f, int m) {
  const FeasiblePoint upper = upper_of(lower, i, m);
  const double fl = f(lower), fu = f(upper);
  Marginals mg{Vec(m), Vec(m)};
  for (int k = 0; k < m; ++k) {
    FeasiblePoint a = lower, b = upper;
    a.idx[i] = k;
    b.idx[i] = k;
    mg.alpha[k] = k == 0 ? 0.0 : f(a) - fl;
    mg.beta[k] = k == m - 1 ? 0.0 : f(b) - fu;
  }
  return mg;
}

double zeta(const Marginals& mg, int hat, int prime) {
  return hat >= prime ? mg.alpha[hat] - mg.alpha[prime]
                      : mg.beta[hat] - mg.beta[prime];
}

PayoffVector nsm_payoff(const ActionDistribution& theta, const Marginals& mg) {
  const int m = theta.size();
  PayoffVector p(m, 0.0);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      p[j] += theta[k] * (0.5 * mg.alpha[k] + 0.5 * mg.beta[k] - zeta(mg, j, k));
  return p;
}

PayoffVector nsm_payoff(const ActionDistribution& theta,
                        const FeasiblePoint& lower, int i,
                        const ObjectiveOracle& f, int m) {
  return nsm_payoff(theta, nsm_marginals(lower, i, f, m));
}

ActionDistribution nsm_local_optimize(const Marginals& mg) {
  const int m = static_cast<int>(mg.alpha.size());
  const int zl = static_cast<int>(std::max_element(mg.beta.begin(), mg.beta.end()) - mg.beta.begin());
  const int zu = static_cast<int>(std::max_element(mg.alpha.begin(), mg.alpha.end()) - mg.alpha.begin());
  if (zu <= zl) return ActionDistribution::point_mass(m, zl);

  // Find θ ∈ Δ(m) with Payoff_j(θ) ≥ 0 for zl ≤ j ≤ zu.
  const int rows = zu - zl + 1;
  const int nv = m + rows;
  std::vector<Vec> A;
  Vec b;
  for (int r = 0; r < rows; ++r) {
    const int j = zl + r;
    Vec row(nv, 0.0);
    for (int k = 0; k < m; ++k)
      row[k] = 0.5 * mg.alpha[k] + 0.5 * mg.beta[k] - zeta(mg, j, k);
    row[m + r] = -1.0;
    A.push_back(std::move(row));
    b.push_back(0.0);
  }
  Vec simplex(nv, 0.0);
  for (int k = 0; k < m; ++k) simplex[k] = 1.0;
  A.push_back(std::move(simplex));
  b.push_back(1.0);
  const LpResult res = solve_lp(A, b, Vec(nv, 0.0));
  if (res.status != LpStatus::optimal) throw LpInfeasible("no θ with nonnegative payoff");
  Vec w(res.x.begin(), res.x.begin() + m);
  for (double& v : w) v = std::max(v, 0.0);
  ActionDistribution theta = validate_distribution(w);
  const PayoffVector p = nsm_payoff(theta, mg);
  for (int j = zl; j <= zu; ++j)
    if (p[j] < -kNonnegTol) throw LpInfeasible("certificate check failed");
  return theta;
}

std::vector<ExplorationBranch> nsm_explore_support(
    const ActionDistribution& theta, const FeasiblePoint& lower, int i, int m) {
  const FeasiblePoint upper = upper_of(lower, i, m);
  std::vector<ExplorationBranch> out;
  out.reserve(2 + 2 * m);
  out.push_back({0.25, PayoffVector(m, -2.0), lower});
  out.push_back({0.25, PayoffVector(m, -2.0), upper});
  Vec below(m), above(m);  // Σ_{k'≤j} θ, Σ_{k'>j} θ
  double run = 0.0;
  for (int j = 0; j < m; ++j) {
    run += theta[j];
    below[j] = run;
    above[j] = 1.0 - run;
  }
  const double scale = 4.0 * m;
  for (int k = 0; k < m; ++k) {
    PayoffVector w(m);
    for (int j = 0; j < m; ++j)
      w[j] = scale * (0.5 * theta[k] + (k <= j ? theta[k] : 0.0) - (k == j ? below[j] : 0.0));
    FeasiblePoint z = lower;
    z.idx[i] = k;
    out.push_back({0.25 / m, std::move(w), std::move(z)});
  }
  for (int k = 0; k < m; ++k) {
    PayoffVector w(m);
    for (int j = 0; j < m; ++j)
      w[j] = scale * (0.5 * theta[k] + (k > j ? theta[k] : 0.0) - (k == j ? above[j] : 0.0));
    FeasiblePoint z = upper;
    z.idx[i] = k;
    out.push_back({0.25 / m, std::move(w), std::move(z)});
  }
  return out;
}

ExplorationSample nsm_explore_sample(const ActionDistribution& theta,
                                     const FeasiblePoint& lower, int i, int m,
                                     Rng& rng) {
  auto b = nsm_explore_support(theta, lower, i, m);
  Vec p;
  for (const auto& x : b) p.push_back(x.prob);
  auto& pick = b[rng.categorical(p)];
  return {std::move(pick.w), std::move(pick.z)};
}

NsmInstance::NsmInstance(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 1) throw BadParams("nsm needs n, m ≥ 1");
}

FeasiblePoint NsmInstance::initial_point() const {
  return make_lattice_point(std::vector<int>(n_, 0));
}

bool NsmInstance::is_feasible(const FeasiblePoint& z) const {
  if (z.tag != AppTag::nsm || static_cast<int>(z.idx.size()) != n_) return false;
  return std::all_of(z.idx.begin(), z.idx.end(), [&](int c) { return c >= 0 && c < m_; });
}

PayoffVector NsmInstance::payoff(int i, const ActionDistribution& theta,
                                 const FeasiblePoint& z,
                                 const ObjectiveOracle& f) const {
  return nsm_payoff(theta, z, i, f, m_);
}

FeasiblePoint NsmInstance::apply(int i, const FeasiblePoint& z, int j) const {
  FeasiblePoint out = z;
  out.idx[i] = j;
  return out;
}

std::vector<ExplorationBranch> NsmInstance::explore_support(
    int i, const ActionDistribution& theta, const FeasiblePoint& z) const {
  return nsm_explore_support(theta, z, i, m_);
}

ActionDistribution NsmInstance::local_optimum(int i, const FeasiblePoint& z,
                                              const ObjectiveOracle& f) const {
  return nsm_local_optimize(nsm_marginals(z, i, f, m_));
}

std::vector<FeasiblePoint> NsmInstance::enumerate_candidates() const {
  if (std::pow(static_cast<double>(m_), n_) > 1e6)
    throw TooLargeToEnumerate("nsm brute force needs m^n ≤ 1e6");
  std::vector<FeasiblePoint> out;
  std::vector<int> x(n_, 0);
  do {
    out.push_back(make_lattice_point(x));
  } while (next_point(x, m_));
  return out;
}

}  // namespace iglearn::nsm
