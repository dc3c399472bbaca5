#pragma once

#include <span>

#include "iglearn/core.hpp"

namespace iglearn {

// Exponent of the ℓq regularizer for dimension d; 2 when the formula
// ln d/(ln d − 1) would leave (1, 2].
double q_exponent(int d);
// Strong-convexity modulus used in the learning rate.
double ftrl_mu(int d);
// √(2μ)/(D_p √T).
double ftrl_eta(int d, double D_p, long T);

// Euclidean projection onto the negative orthant ∩ unit ball.
Vec project_K(std::span<const double> x);

struct OloState {
  int d = 0;
  Vec cum_loss;  // Σ −p_τ
  long round = 0;
  double q = 2.0;
  double eta = 1.0;
  double D_p = 1.0;
  bool anytime = false;

  static OloState make(int d, double D_p, long T, bool anytime = false);
  // Rate for the next solve; the anytime variant uses the current round.
  double current_eta() const;
};

struct FtrlStats {
  long solves = 0;
  long pgd_iterations = 0;
  long nonconvergence = 0;
};

// argmin over K of ⟨cum_loss, w⟩ + ½‖w‖_q²/η. Exact for q = 2 and whenever the
// orthant solution lies inside the ball; otherwise projected gradient descent
// (stops when a step moves less than 1e-8 or gains under 1e-14 relative;
// 200 iterations) starting from the better of `warm` and the
// scaled orthant solution, then a bisection on the stationarity conditions
// when the iteration cap is hit.
Vec ftrl_next(const OloState& s, const Vec* warm = nullptr,
              FtrlStats* stats = nullptr);

ActionDistribution proportional_response(std::span<const double> w);

// Bilinear saddle against the marginal polytope A_m, weights u on the simplex.
struct SaddleResult {
  ActionDistribution theta;
  double value;
};
SaddleResult saddle_solve(std::span<const double> u);
// max over A_m of the saddle objective at a fixed θ (independent primal LP).
double saddle_inner_max(const ActionDistribution& theta,
                        std::span<const double> u);
// Saddle objective at a fixed θ and a fixed (α, β).
double saddle_objective(const ActionDistribution& theta,
                        std::span<const double> u,
                        std::span<const double> alpha,
                        std::span<const double> beta);
inline constexpr double kSaddleTol = 1e-6;
// Throws SaddleValuePositive when the certified value exceeds kSaddleTol.
ActionDistribution saddle_response(std::span<const double> w,
                                   double* value_out = nullptr);

class BlackwellState {
 public:
  struct Stats {
    FtrlStats ftrl;
    long saddle_calls = 0;
    double max_saddle_value = -1.0;
  };

  BlackwellState(int d, double D_p, long T, Responder responder,
                 bool anytime = false);

  const ActionDistribution& action() const { return theta_; }
  const Vec& w() const { return w_; }
  const OloState& olo() const { return olo_; }
  const Stats& stats() const { return stats_; }
  long fed() const { return olo_.round; }

  // Adds loss −payoff, re-solves FTRL and refreshes θ.
  void feed(std::span<const double> payoff);

 private:
  void respond();

  OloState olo_;
  Responder responder_;
  Vec w_;
  ActionDistribution theta_;
  Stats stats_;
};

// Feeds the realized payoff (when given) and returns the next θ.
const ActionDistribution& algb_step(BlackwellState& state,
                                    const PayoffVector* realized);

// Multiplicative weights over m arms, rate √(8 ln m / T).
class HedgeState {
 public:
  HedgeState(int m, long T);
  const ActionDistribution& action() const { return theta_; }
  const ActionDistribution& step(std::span<const double> reward);

 private:
  double eta_;
  Vec score_;
  ActionDistribution theta_;
};

inline const ActionDistribution& hedge_step(HedgeState& s,
                                            std::span<const double> reward) {
  return s.step(reward);
}

}  // namespace iglearn
