// Copyright 2026 The netslice Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference computations that share no code with the library: plain
// formulas, dense scans and exhaustive grids.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline double sigmoid(double t, double k, double z) { return 1.0 / (1.0 + std::exp(-t * (z - k))); }

inline double sigmoid_d1(double t, double k, double z) {
  const double s = sigmoid(t, k, z);
  return t * s * (1.0 - s);
}

// Maximizer of f on [lo, hi]: dense scan, then golden-section polish of the
// best bracket.
inline double scan_argmax(const std::function<double(double)>& f, double lo, double hi, int n = 200000) {
  const double h = (hi - lo) / n;
  int best = 0;
  double fb = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = f(lo + i * h);
    if (v > fb) {
      fb = v;
      best = i;
    }
  }
  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(n, best + 1) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (f(c) >= f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  const double x = 0.5 * (a + b);
  return f(x) >= fb ? x : lo + best * h;
}

// Tangency point of the concave envelope from the origin: the maximizer of
// the chord slope (u(w) - u(0)) / w.
inline double tangent_point(double t, double k) {
  const double u0 = sigmoid(t, k, 0.0);
  return scan_argmax([&](double w) { return (sigmoid(t, k, w) - u0) / w; }, 1e-9, k + 60.0 / t);
}

// Concave envelope value at z given the tangency point w.
inline double envelope(double t, double k, double w, double z) {
  const double u0 = sigmoid(t, k, 0.0);
  if (z >= w) return sigmoid(t, k, z);
  return u0 + z * (sigmoid(t, k, w) - u0) / w;
}

// Largest gap between the envelope and the sigmoid, by dense scan.
inline double nonconcavity(double t, double k) {
  const double w = tangent_point(t, k);
  const double z = scan_argmax([&](double s) { return envelope(t, k, w, s) - sigmoid(t, k, s); }, 0.0, w);
  return envelope(t, k, w, z) - sigmoid(t, k, z);
}

// Revenue-maximizing price of p / (1 + exp(t_p (p - b))).
inline double best_price(double tp, double b) {
  return scan_argmax([&](double p) { return p / (1.0 + std::exp(tp * (p - b))); }, 0.0, b + 60.0 / tp);
}

struct GridResult {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
};

// Exhaustive grid search over the box [0, hi_j]^d restricted to
// feasible(x), followed by rounds of local grids shrinking around the best
// point.
inline GridResult grid_maximize(int d, const std::vector<double>& hi,
                                const std::function<bool(const std::vector<double>&)>& feasible,
                                const std::function<double(const std::vector<double>&)>& f, int points,
                                int rounds = 12) {
  GridResult best;
  std::vector<double> step(d), lo(d, 0.0), top(hi);
  for (int j = 0; j < d; ++j) step[j] = hi[j] / (points - 1);
  for (int round = 0; round <= rounds; ++round) {
    std::vector<int> idx(d, 0);
    std::vector<int> n(d);
    for (int j = 0; j < d; ++j) n[j] = static_cast<int>(std::floor((top[j] - lo[j]) / step[j] + 1e-9)) + 1;
    std::vector<double> x(d);
    for (;;) {
      for (int j = 0; j < d; ++j) x[j] = std::min(lo[j] + idx[j] * step[j], hi[j]);
      if (feasible(x)) {
        const double v = f(x);
        if (v > best.value) {
          best.value = v;
          best.x = x;
        }
      }
      int j = 0;
      while (j < d && ++idx[j] >= n[j]) idx[j++] = 0;
      if (j == d) break;
    }
    for (int j = 0; j < d; ++j) {
      lo[j] = std::max(0.0, best.x[j] - 2.0 * step[j]);
      top[j] = std::min(hi[j], best.x[j] + 2.0 * step[j]);
      step[j] /= 4.0;
    }
  }
  return best;
}

struct User {
  double t, k, weight;
  std::vector<double> beta;
};

// Exact intra-slice optimum: every NP's capacity is split among the users
// (the objective is nondecreasing, so full use is optimal). The last user on
// each NP takes the remainder.
inline GridResult brute_force_split(const std::vector<User>& users, const std::vector<double>& cap,
                                    int points = 41) {
  const int n = static_cast<int>(users.size());
  const int K = static_cast<int>(cap.size());
  const int free_per_np = n - 1;
  const auto expand = [&](const std::vector<double>& x) {
    std::vector<std::vector<double>> r(n, std::vector<double>(K, 0.0));
    for (int k = 0; k < K; ++k) {
      double used = 0.0;
      for (int i = 0; i < free_per_np; ++i) {
        r[i][k] = x[k * free_per_np + i];
        used += r[i][k];
      }
      r[n - 1][k] = std::max(0.0, cap[k] - used);
    }
    return r;
  };
  const auto value = [&](const std::vector<std::vector<double>>& r) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      double z = 0.0;
      for (int k = 0; k < K; ++k) z += users[i].beta[k] * r[i][k];
      v += users[i].weight * sigmoid(users[i].t, users[i].k, z);
    }
    return v;
  };
  if (free_per_np == 0) {
    GridResult g;
    g.x = {};
    g.value = value(expand({}));
    return g;
  }
  std::vector<double> hi;
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < free_per_np; ++i) hi.push_back(cap[k]);
  }
  const auto feasible = [&](const std::vector<double>& x) {
    for (int k = 0; k < K; ++k) {
      double used = 0.0;
      for (int i = 0; i < free_per_np; ++i) used += x[k * free_per_np + i];
      if (used > cap[k] + 1e-12) return false;
    }
    return true;
  };
  return grid_maximize(static_cast<int>(hi.size()), hi, feasible, [&](const auto& x) { return value(expand(x)); },
                       points);
}

// Average ranks, ties sharing the mean rank.
inline std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t m = i; m <= j; ++m) r[idx[m]] = 0.5 * (i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
