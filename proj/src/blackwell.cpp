#include "iglearn/blackwell.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>

#include "iglearn/lp.hpp"

namespace iglearn {

double q_exponent(int d) {
  const double ld = std::log(static_cast<double>(d));
  if (ld <= 2.0) return 2.0;
  return ld / (ld - 1.0);
}

double ftrl_mu(int d) {
  if (d < 2) return 1.0;
  return 1.0 / (3.0 * std::log(static_cast<double>(d)));
}

double ftrl_eta(int d, double D_p, long T) {
  return std::sqrt(2.0 * ftrl_mu(d)) / (D_p * std::sqrt(static_cast<double>(std::max(1L, T))));
}

Vec project_K(std::span<const double> x) {
  Vec y(x.size());
  double n2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::min(x[i], 0.0);
    n2 += y[i] * y[i];
  }
  if (n2 > 1.0) {
    const double s = 1.0 / std::sqrt(n2);
    for (double& v : y) v *= s;
  }
  return y;
}

OloState OloState::make(int d, double D_p, long T, bool anytime) {
  OloState s;
  s.d = d;
  s.cum_loss.assign(d, 0.0);
  s.q = q_exponent(d);
  s.D_p = D_p;
  s.anytime = anytime;
  s.eta = ftrl_eta(d, D_p, anytime ? 1 : T);
  return s;
}

double OloState::current_eta() const {
  if (!anytime) return eta;
  return eta / std::sqrt(static_cast<double>(round + 1));
}

namespace {

double norm2(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double pnorm(const Vec& x, double p) {
  double mx = 0.0;
  for (double v : x) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

// Projection onto the nonnegative orthant ∩ unit ball.
void project_pos(Vec& x) {
  double n2 = 0.0;
  for (double& v : x) {
    v = std::max(v, 0.0);
    n2 += v * v;
  }
  if (n2 > 1.0) {
    const double s = 1.0 / std::sqrt(n2);
    for (double& v : x) v *= s;
  }
}

// v ≥ 0 with A·v^{q−1} + B·v = a (a > 0), by Newton in log v from above.
double solve_coordinate(double a, double A, double B, double q) {
  double ub = std::numeric_limits<double>::infinity();
  if (B > 0.0) ub = a / B;
  if (A > 0.0) ub = std::min(ub, std::pow(a / A, 1.0 / (q - 1.0)));
  double t = std::log(ub);
  for (int it = 0; it < 100; ++it) {
    const double e1 = A * std::exp((q - 1.0) * t), e2 = B * std::exp(t);
    const double h = e1 + e2 - a;
    const double dh = (q - 1.0) * e1 + e2;
    if (h <= 0.0 || dh <= 0.0) break;
    const double step = h / dh;
    t -= step;
    if (step < 1e-15) break;
  }
  return std::exp(t);
}

// Boundary case of the FTRL problem (‖v‖₂ = 1 active), through the
// stationarity conditions a_i = (‖v‖_q^{2−q}/η)·v_i^{q−1} + B·v_i: bisection on
// the multiplier B, and for each B bisection on N = ‖v‖_q.
Vec kkt_boundary_solve(const Vec& a, double q, double eta) {
  const int d = static_cast<int>(a.size());
  Vec v(d, 0.0);
  auto fill = [&](double A, double B) {
    for (int i = 0; i < d; ++i) v[i] = a[i] > 0.0 ? solve_coordinate(a[i], A, B, q) : 0.0;
  };
  auto solve_for_B = [&](double B) {
    double lo = 0.0, hi = 1.0;
    auto phi = [&](double N) {
      fill(std::pow(N, 2.0 - q) / eta, B);
      return N - pnorm(v, q);
    };
    while (phi(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    fill(std::pow(hi, 2.0 - q) / eta, B);
    return norm2(v);
  };
  double lo = 0.0, hi = norm2(a);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (solve_for_B(mid) > 1.0 ? lo : hi) = mid;
  }
  solve_for_B(hi);
  return v;
}

void warn_nonconvergence() {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true))
    std::clog << "iglearn: ftrl inner solver hit its iteration cap; "
                 "using best iterate\n";
}

}  // namespace

Vec ftrl_next(const OloState& s, const Vec* warm, FtrlStats* stats) {
  if (stats) ++stats->solves;
  const int d = s.d;
  const double eta = s.current_eta();
  if (s.q == 2.0) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = -eta * s.cum_loss[i];
    return project_K(x);
  }

  // Work with v = −w ≥ 0: minimize −⟨a, v⟩ + ½‖v‖_q²/η with a = max(L, 0);
  // coordinates with L_i ≤ 0 stay at zero.
  Vec a(d);
  bool any = false;
  for (int i = 0; i < d; ++i) {
    a[i] = std::max(s.cum_loss[i], 0.0);
    any = any || a[i] > 0.0;
  }
  if (!any) return Vec(d, 0.0);
  const double q = s.q;
  const double p = q / (q - 1.0);

  // Orthant optimum via the dual-norm map.
  Vec v(d, 0.0);
  const double ap = pnorm(a, p);
  const double scale = eta * std::pow(ap, 2.0 - p);
  for (int i = 0; i < d; ++i)
    if (a[i] > 0.0) v[i] = scale * std::pow(a[i], p - 1.0);
  if (norm2(v) <= 1.0) {
    for (double& x : v) x = -x;
    return v;
  }

  auto objective = [&](const Vec& x) {
    double lin = 0.0;
    for (int i = 0; i < d; ++i) lin += a[i] * x[i];
    const double nq = pnorm(x, q);
    return -lin + 0.5 * nq * nq / eta;
  };
  auto gradient = [&](const Vec& x, Vec& g) {
    const double nq = pnorm(x, q);
    const double c = nq > 0.0 ? std::pow(nq, 2.0 - q) : 0.0;
    for (int i = 0; i < d; ++i)
      g[i] = -a[i] + (x[i] > 0.0 ? c * std::pow(x[i], q - 1.0) / eta : 0.0);
  };

  Vec x = v;
  project_pos(x);
  double fx = objective(x);
  if (warm && static_cast<int>(warm->size()) == d) {
    Vec xw(d);
    for (int i = 0; i < d; ++i) xw[i] = -(*warm)[i];
    project_pos(xw);
    const double fw = objective(xw);
    if (fw < fx) {
      x = std::move(xw);
      fx = fw;
    }
  }

  constexpr int kMaxIter = 200;
  constexpr double kTol = 1e-8;
  double step = eta;
  Vec g(d), xn(d);
  bool converged = false;
  int it = 0;
  for (; it < kMaxIter && !converged; ++it) {
    gradient(x, g);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < d; ++i) xn[i] = x[i] - step * g[i];
      project_pos(xn);
      double move2 = 0.0;
      for (int i = 0; i < d; ++i) move2 += (xn[i] - x[i]) * (xn[i] - x[i]);
      const double fn = objective(xn);
      if (fn <= fx - 0.5 * move2 / step + 1e-15) {
        double moved = 0.0;
        for (int i = 0; i < d; ++i) moved = std::max(moved, std::abs(xn[i] - x[i]));
        converged = moved < kTol || fx - fn <= 1e-14 * std::max(1.0, std::abs(fx));
        std::swap(x, xn);
        fx = fn;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) converged = true;  // no descent possible at machine precision
  }
  if (stats) stats->pgd_iterations += it;
  if (!converged) {
    // Fall back to the stationarity system; accept it when it does at least
    // as well as the best PGD iterate.
    Vec xk = kkt_boundary_solve(a, q, eta);
    project_pos(xk);
    const double fk = objective(xk);
    if (fk <= fx + 1e-12 * std::max(1.0, std::abs(fx))) {
      converged = true;
      if (fk < fx) x = std::move(xk);
    }
  }
  if (!converged) {
    if (stats) ++stats->nonconvergence;
    warn_nonconvergence();
  }
  for (double& val : x) val = -val;
  return x;
}

ActionDistribution proportional_response(std::span<const double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  if (total < -1e-12) {
    Vec mass(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) mass[j] = std::max(0.0, -w[j]);
    return validate_distribution(mass);
  }
  return ActionDistribution::uniform(static_cast<int>(w.size()));
}

namespace {

// Free variables of A_m: α_k for k = 1..m−1, then β_k for k = 0..m−2
// (α_0 = β_{m−1} = 0 are fixed).
int alpha_var(int k) { return k >= 1 ? k - 1 : -1; }
int beta_var(int k, int m) { return k <= m - 2 ? (m - 1) + k : -1; }

struct Polytope {
  int nv;
  std::vector<Vec> G;  // G x ≤ h
  Vec h;
};

Polytope marginal_polytope(int m) {
  Polytope P;
  P.nv = 2 * (m - 1);
  for (int v = 0; v < P.nv; ++v) {
    Vec up(P.nv, 0.0), down(P.nv, 0.0);
    up[v] = 1.0;
    down[v] = -1.0;
    P.G.push_back(up);
    P.h.push_back(1.0);
    P.G.push_back(down);
    P.h.push_back(1.0);
  }
  // α_{k+1} − α_k ≥ β_{k+1} − β_k
  for (int k = 0; k + 1 < m; ++k) {
    Vec row(P.nv, 0.0);
    if (int v = alpha_var(k + 1); v >= 0) row[v] -= 1.0;
    if (int v = alpha_var(k); v >= 0) row[v] += 1.0;
    if (int v = beta_var(k + 1, m); v >= 0) row[v] += 1.0;
    if (int v = beta_var(k, m); v >= 0) row[v] -= 1.0;
    P.G.push_back(row);
    P.h.push_back(0.0);
  }
  return P;
}

// C[v][k]: the saddle objective's coefficient on x_v is Σ_k C[v][k] θ_k.
std::vector<Vec> saddle_coefficients(std::span<const double> u) {
  const int m = static_cast<int>(u.size());
  std::vector<Vec> C(2 * (m - 1), Vec(m, 0.0));
  auto add_alpha = [&](int k, int col, double c) {
    if (int v = alpha_var(k); v >= 0) C[v][col] += c;
  };
  auto add_beta = [&](int k, int col, double c) {
    if (int v = beta_var(k, m); v >= 0) C[v][col] += c;
  };
  for (int k = 0; k < m; ++k) {
    add_alpha(k, k, -0.5);
    add_beta(k, k, -0.5);
    for (int j = 0; j < m; ++j) {
      if (j > k) {
        add_alpha(j, k, u[j]);
        add_alpha(k, k, -u[j]);
      } else if (j < k) {
        add_beta(j, k, u[j]);
        add_beta(k, k, -u[j]);
      }
    }
  }
  return C;
}

ActionDistribution clean_simplex(const Vec& x, int m) {
  Vec w(m);
  for (int k = 0; k < m; ++k) w[k] = std::max(0.0, x[k]);
  return validate_distribution(w);
}

}  // namespace

double saddle_objective(const ActionDistribution& theta,
                        std::span<const double> u,
                        std::span<const double> alpha,
                        std::span<const double> beta) {
  const int m = theta.size();
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    double e = 0.0;
    for (int k = 0; k < m; ++k) {
      const double zeta = j >= k ? alpha[j] - alpha[k] : beta[j] - beta[k];
      e += theta[k] * (zeta - 0.5 * alpha[k] - 0.5 * beta[k]);
    }
    total += u[j] * e;
  }
  return total;
}

SaddleResult saddle_solve(std::span<const double> u) {
  const int m = static_cast<int>(u.size());
  if (m == 1) return {ActionDistribution::uniform(1), 0.0};
  const Polytope P = marginal_polytope(m);
  const auto C = saddle_coefficients(u);
  const int R = static_cast<int>(P.G.size());
  // Variables: θ (m), then λ (R) for the dual of the inner maximization.
  const int n = m + R;
  std::vector<Vec> A;
  Vec b, c(n, 0.0);
  for (int v = 0; v < P.nv; ++v) {
    Vec row(n, 0.0);
    for (int k = 0; k < m; ++k) row[k] = -C[v][k];
    for (int r = 0; r < R; ++r) row[m + r] = P.G[r][v];
    A.push_back(std::move(row));
    b.push_back(0.0);
  }
  Vec simplex(n, 0.0);
  for (int k = 0; k < m; ++k) simplex[k] = 1.0;
  A.push_back(std::move(simplex));
  b.push_back(1.0);
  for (int r = 0; r < R; ++r) c[m + r] = P.h[r];

  const LpResult res = solve_lp(A, b, c);
  if (res.status != LpStatus::optimal)
    throw SaddleValuePositive("saddle program has no optimum");
  return {clean_simplex(res.x, m), res.objective};
}

double saddle_inner_max(const ActionDistribution& theta,
                        std::span<const double> u) {
  const int m = theta.size();
  if (m == 1) return 0.0;
  const Polytope P = marginal_polytope(m);
  const auto C = saddle_coefficients(u);
  const int R = static_cast<int>(P.G.size());
  Vec cx(P.nv, 0.0);
  for (int v = 0; v < P.nv; ++v)
    for (int k = 0; k < m; ++k) cx[v] += C[v][k] * theta[k];
  // Shift x' = x + 1 ≥ 0 and add one slack per inequality.
  const int n = P.nv + R;
  std::vector<Vec> A;
  Vec b, c(n, 0.0);
  for (int r = 0; r < R; ++r) {
    Vec row(n, 0.0);
    double g1 = 0.0;
    for (int v = 0; v < P.nv; ++v) {
      row[v] = P.G[r][v];
      g1 += P.G[r][v];
    }
    row[P.nv + r] = 1.0;
    A.push_back(std::move(row));
    b.push_back(P.h[r] + g1);
  }
  double shift = 0.0;
  for (int v = 0; v < P.nv; ++v) {
    c[v] = -cx[v];
    shift += cx[v];
  }
  const LpResult res = solve_lp(A, b, c);
  if (res.status != LpStatus::optimal) throw Error("inner saddle program failed");
  return -res.objective - shift;
}

ActionDistribution saddle_response(std::span<const double> w,
                                   double* value_out) {
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total < -1e-12)) {
    if (value_out) *value_out = 0.0;
    return ActionDistribution::uniform(static_cast<int>(w.size()));
  }
  Vec u(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) u[j] = std::max(0.0, w[j] / total);
  SaddleResult res = saddle_solve(u);
  if (value_out) *value_out = res.value;
  if (res.value > kSaddleTol)
    throw SaddleValuePositive("saddle value " + std::to_string(res.value) +
                              " exceeds tolerance");
  return std::move(res.theta);
}

BlackwellState::BlackwellState(int d, double D_p, long T, Responder responder,
                               bool anytime)
    : olo_(OloState::make(d, D_p, T, anytime)),
      responder_(responder),
      w_(d, 0.0),
      theta_(ActionDistribution::uniform(d)) {}

void BlackwellState::feed(std::span<const double> payoff) {
  for (int i = 0; i < olo_.d; ++i) olo_.cum_loss[i] -= payoff[i];
  ++olo_.round;
  w_ = ftrl_next(olo_, &w_, &stats_.ftrl);
  respond();
}

void BlackwellState::respond() {
  if (responder_ == Responder::proportional) {
    theta_ = proportional_response(w_);
    return;
  }
  double value = 0.0;
  ++stats_.saddle_calls;
  try {
    theta_ = saddle_response(w_, &value);
  } catch (const SaddleValuePositive&) {
    stats_.max_saddle_value = std::max(stats_.max_saddle_value, value);
    throw;
  }
  stats_.max_saddle_value = std::max(stats_.max_saddle_value, value);
}

const ActionDistribution& algb_step(BlackwellState& state,
                                    const PayoffVector* realized) {
  if (realized) state.feed(*realized);
  return state.action();
}

HedgeState::HedgeState(int m, long T)
    : eta_(std::sqrt(8.0 * std::log(static_cast<double>(std::max(m, 2))) /
                     static_cast<double>(std::max(1L, T)))),
      score_(m, 0.0),
      theta_(ActionDistribution::uniform(m)) {}

const ActionDistribution& HedgeState::step(std::span<const double> reward) {
  const int m = static_cast<int>(score_.size());
  for (int j = 0; j < m; ++j) score_[j] += reward[j];
  const double top = *std::max_element(score_.begin(), score_.end());
  Vec w(m);
  for (int j = 0; j < m; ++j) w[j] = std::exp(eta_ * (score_[j] - top));
  theta_ = validate_distribution(w);
  return theta_;
}

}  // namespace iglearn
