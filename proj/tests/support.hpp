#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "iglearn/core.hpp"
#include "iglearn/sm.hpp"

namespace support {

using iglearn::Vec;

// Random point of the simplex, sometimes with zero coordinates.
inline iglearn::ActionDistribution random_theta(int m, iglearn::Rng& rng) {
  Vec w(m);
  for (double& x : w) x = rng.bernoulli(0.2) ? 0.0 : -std::log(1.0 - rng.uniform());
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) w[rng.uniform_int(m)] = 1.0;
  return iglearn::validate_distribution(w);
}

// Set function given by an explicit table over masks.
class TableSet : public iglearn::sm::SetFunction {
 public:
  TableSet(int n, Vec table) : n_(n), t_(std::move(table)) {}
  int ground_size() const override { return n_; }
  double of_mask(iglearn::sm::Mask s) const override { return t_[s]; }

 private:
  int n_;
  Vec t_;
};

inline double linf(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// E[f(z)·w] over an enumerated sampler support.
template <class Branches, class F>
Vec support_mean(const Branches& branches, const F& f, int d) {
  Vec out(d, 0.0);
  for (const auto& b : branches) {
    const double v = f(b.z);
    for (int j = 0; j < d; ++j) out[j] += b.prob * v * b.w[j];
  }
  return out;
}

// Nearest point of K by successively refined grid search over polar
// coordinates y = r·u(φ), r ∈ [0, 1], u on the unit sphere's negative orthant
// part. Independent of project_K; exact grid steps land on every face.
inline Vec grid_projection(const Vec& x) {
  const int d = static_cast<int>(x.size());
  const int dims = d;  // r plus d − 1 angles
  auto point = [d](const Vec& p) {
    Vec y(d);
    double s = 1.0;
    for (int i = 0; i < d - 1; ++i) {
      y[i] = -p[0] * s * std::cos(p[1 + i]);
      s *= std::sin(p[1 + i]);
    }
    y[d - 1] = -p[0] * s;
    return y;
  };
  Vec lo(dims, 0.0), hi(dims, std::acos(0.0));
  hi[0] = 1.0;
  Vec center(dims), half(dims);
  for (int i = 0; i < dims; ++i) {
    center[i] = 0.5 * (lo[i] + hi[i]);
    half[i] = 0.5 * (hi[i] - lo[i]);
  }
  Vec best = point(center);
  Vec best_p = center;
  double best_dist = 1e300;
  const int steps = 20;
  for (int level = 0; level < 45; ++level) {
    std::vector<int> idx(dims, 0);
    while (true) {
      Vec p(dims);
      for (int i = 0; i < dims; ++i)
        p[i] = std::clamp(center[i] - half[i] + 2.0 * half[i] * idx[i] / steps, lo[i], hi[i]);
      const Vec y = point(p);
      double dist = 0.0;
      for (int i = 0; i < d; ++i) dist += (y[i] - x[i]) * (y[i] - x[i]);
      if (dist < best_dist) {
        best_dist = dist;
        best = y;
        best_p = p;
      }
      int c = 0;
      while (c < dims && ++idx[c] > steps) idx[c++] = 0;
      if (c == dims) break;
    }
    center = best_p;
    for (double& h : half) h *= 0.6;
  }
  return best;
}

}  // namespace support
