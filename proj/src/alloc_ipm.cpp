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

#include "netslice/alloc_ipm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netslice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBarrierShrink = 8.0;
constexpr double kArmijo = 0.01;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Barrier method on the bound-constrained form of AllocProblem.
class BarrierSolver {
 public:
  BarrierSolver(const AllocProblem& p, const AllocOptions& o) : p_(p), opt_(o) {
    n_ = static_cast<int>(p.terms.size());
    K_ = p.num_nps;
    price_.assign(K_, 0.0);
    if (!p.price.empty()) price_ = p.price;
    cap_.assign(K_, kInf);
    if (!p.capacity.empty()) cap_ = p.capacity;
    for (int k = 0; k < K_; ++k) {
      if (cap_[k] > 0.0) act_.push_back(k);
    }
    Ka_ = static_cast<int>(act_.size());
    live_.assign(n_, 0);
    elastic_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
      const auto& t = p.terms[i];
      if (static_cast<int>(t.beta.size()) != K_) {
        throw std::invalid_argument("allocation term has a beta of the wrong dimension");
      }
      live_[i] = Ka_ > 0 && t.env.hi > 0.0;
      elastic_[i] = live_[i] && t.env.lo > 0.0;
    }
    m_ = 0;
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      m_ += Ka_;
      if (std::isfinite(p.terms[i].env.hi)) ++m_;
      if (elastic_[i]) m_ += 2;
    }
    for (int k : act_) {
      if (std::isfinite(cap_[k])) ++m_;
    }
    off_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
      off_[i] = dim_;
      if (live_[i]) dim_ += Ka_ + (elastic_[i] ? 1 : 0);
    }
  }

  AllocSolution run() {
    AllocSolution sol;
    r_.assign(static_cast<std::size_t>(n_) * K_, 0.0);
    e_.assign(n_, 0.0);
    double scale = 1.0;
    for (const auto& t : p_.terms) scale += std::abs(t.weight);
    if (m_ == 0) {
      finish(sol, 0.0, true);
      return sol;
    }
    initial_point();
    double tau = 0.05 * scale / m_;
    const double tau_final = opt_.gap_tol * scale / m_;
    bool ok = true;
    int steps = 0;
    for (;;) {
      ok = center(tau, steps) && ok;
      if (tau <= tau_final || steps >= opt_.max_newton) break;
      tau = std::max(tau / kBarrierShrink, tau_final);
    }
    sol.newton_steps = steps;
    const double before = penalized();
    snap(tau);
    const double after = penalized();
    finish(sol, m_ * tau + std::max(0.0, before - after), ok && steps < opt_.max_newton);
    return sol;
  }

 private:
  double z_of(int i, const std::vector<double>& r) const {
    const auto& beta = p_.terms[i].beta;
    double z = 0.0;
    for (int k : act_) z += beta[k] * r[static_cast<std::size_t>(i) * K_ + k];
    return z;
  }

  std::vector<double> y_of(const std::vector<double>& r) const {
    std::vector<double> y(K_, 0.0);
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < K_; ++k) y[k] += r[static_cast<std::size_t>(i) * K_ + k];
    }
    return y;
  }

  void initial_point() {
    if (opt_.start.size() == r_.size()) {
      for (int i = 0; i < n_; ++i) {
        if (!live_[i]) continue;
        for (int k : act_) {
          const std::size_t j = static_cast<std::size_t>(i) * K_ + k;
          r_[j] = std::max(opt_.start[j], 1e-3);
        }
        if (elastic_[i]) e_[i] = std::max(p_.terms[i].env.lo - z_of(i, r_), 0.0) + 1.0;
      }
      if (std::isfinite(barrier(r_, e_, 1.0))) return;
      std::fill(r_.begin(), r_.end(), 0.0);
    }
    double theta = 10.0;
    for (int k : act_) {
      if (std::isfinite(cap_[k])) theta = std::min(theta, 0.5 * cap_[k] / std::max(1, n_));
    }
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      const auto& t = p_.terms[i];
      double bsum = 0.0;
      for (int k : act_) bsum += t.beta[k];
      if (std::isfinite(t.env.hi) && bsum > 0.0) theta = std::min(theta, 0.5 * t.env.hi / bsum);
    }
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      for (int k : act_) r_[static_cast<std::size_t>(i) * K_ + k] = theta;
      if (elastic_[i]) e_[i] = std::max(p_.terms[i].env.lo - z_of(i, r_), 0.0) + 1.0;
    }
  }

  // Objective of the maximisation including the elastic penalty.
  double penalized_at(const std::vector<double>& r, const std::vector<double>& e) const {
    double f = 0.0;
    for (int i = 0; i < n_; ++i) {
      f += eval_term(p_.terms[i], z_of(i, r)).value;
      if (elastic_[i]) f -= p_.elastic_penalty * e[i];
    }
    const auto y = y_of(r);
    for (int k = 0; k < K_; ++k) f -= price_[k] * y[k] + p_.lambda * y[k] * y[k];
    return f;
  }
  double penalized() const { return penalized_at(r_, e_); }

  // Barrier objective to minimise; +inf outside the domain.
  double barrier(const std::vector<double>& r, const std::vector<double>& e, double tau) const {
    double logs = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      const auto& t = p_.terms[i];
      for (int k : act_) {
        const double v = r[static_cast<std::size_t>(i) * K_ + k];
        if (!(v > 0.0)) return kInf;
        logs += std::log(v);
      }
      const double z = z_of(i, r);
      if (std::isfinite(t.env.hi)) {
        if (!(t.env.hi - z > 0.0)) return kInf;
        logs += std::log(t.env.hi - z);
      }
      if (elastic_[i]) {
        const double s = z + e[i] - t.env.lo;
        if (!(s > 0.0) || !(e[i] > 0.0)) return kInf;
        logs += std::log(s) + std::log(e[i]);
      }
    }
    const auto y = y_of(r);
    for (int k : act_) {
      if (std::isfinite(cap_[k])) {
        if (!(cap_[k] - y[k] > 0.0)) return kInf;
        logs += std::log(cap_[k] - y[k]);
      }
    }
    return -penalized_at(r, e) - tau * logs;
  }

  // Newton direction at the current point; returns the squared decrement.
  // The Hessian is per-user blocks plus a diagonal NP coupling; it is
  // assembled densely and factored after symmetric Jacobi scaling.
  double newton_direction(double tau) {
    const auto y = y_of(r_);
    std::vector<double> coupling_grad(Ka_), dk(Ka_);
    for (int a = 0; a < Ka_; ++a) {
      const int k = act_[a];
      double g = price_[k] + 2.0 * p_.lambda * y[k];
      double d = 2.0 * p_.lambda;
      if (std::isfinite(cap_[k])) {
        const double s = cap_[k] - y[k];
        g += tau / s;
        d += tau / (s * s);
      }
      coupling_grad[a] = g;
      dk[a] = d;
    }
    hess_.setZero(dim_, dim_);
    grad_.setZero(dim_);
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      const auto& t = p_.terms[i];
      const int o = off_[i];
      const double z = z_of(i, r_);
      const TermValue tv = eval_term(t, z);
      double curv = -tv.d2;
      double hi_term = 0.0;
      if (std::isfinite(t.env.hi)) {
        const double s = t.env.hi - z;
        hi_term = tau / s;
        curv += tau / (s * s);
      }
      double lo_term = 0.0;
      double lo_curv = 0.0;
      if (elastic_[i]) {
        const double s = z + e_[i] - t.env.lo;
        lo_term = tau / s;
        lo_curv = tau / (s * s);
        curv += lo_curv;
      }
      for (int a = 0; a < Ka_; ++a) {
        const int k = act_[a];
        const double rk = r_[static_cast<std::size_t>(i) * K_ + k];
        const double bk = t.beta[k];
        grad_[o + a] = -tv.d1 * bk + coupling_grad[a] - tau / rk + hi_term * bk - lo_term * bk;
        for (int b = 0; b < Ka_; ++b) hess_(o + a, o + b) = curv * bk * t.beta[act_[b]];
        hess_(o + a, o + a) += tau / (rk * rk);
      }
      if (elastic_[i]) {
        const int ie = o + Ka_;
        grad_[ie] = p_.elastic_penalty - lo_term - tau / e_[i];
        for (int a = 0; a < Ka_; ++a) {
          hess_(o + a, ie) = lo_curv * t.beta[act_[a]];
          hess_(ie, o + a) = hess_(o + a, ie);
        }
        hess_(ie, ie) = lo_curv + tau / (e_[i] * e_[i]);
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      for (int j = 0; j < n_; ++j) {
        if (!live_[j]) continue;
        for (int a = 0; a < Ka_; ++a) hess_(off_[i] + a, off_[j] + a) += dk[a];
      }
    }
    const VectorXd scale = hess_.diagonal().cwiseSqrt().cwiseInverse();
    hess_ = scale.asDiagonal() * hess_ * scale.asDiagonal();
    const VectorXd rhs = -scale.cwiseProduct(grad_);
    VectorXd step;
    Eigen::LLT<MatrixXd> llt(hess_);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(rhs);
    } else {
      step = hess_.ldlt().solve(rhs);
    }
    step = scale.cwiseProduct(step);
    dr_.assign(r_.size(), 0.0);
    de_.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      for (int a = 0; a < Ka_; ++a) dr_[static_cast<std::size_t>(i) * K_ + act_[a]] = step[off_[i] + a];
      if (elastic_[i]) de_[i] = step[off_[i] + Ka_];
    }
    return -grad_.dot(step);
  }

  bool center(double tau, int& steps) {
    double phi = barrier(r_, e_, tau);
    std::vector<double> rt(r_.size()), et(e_.size());
    auto trial_at = [&](double step) {
      for (std::size_t j = 0; j < r_.size(); ++j) rt[j] = r_[j] + step * dr_[j];
      for (std::size_t j = 0; j < e_.size(); ++j) et[j] = e_[j] + step * de_[j];
      return barrier(rt, et, tau);
    };
    while (steps < opt_.max_newton) {
      const double dec = newton_direction(tau);
      ++steps;
      if (!(dec >= 0.0) || !std::isfinite(dec)) return false;
      if (0.5 * dec <= std::max(1e-2 * tau, 1e-15 * (1.0 + std::abs(phi)))) return true;
      double step = 1.0;
      double trial = kInf;
      for (int ls = 0; ls < 80; ++ls) {
        trial = trial_at(step);
        if (trial <= phi - kArmijo * step * dec) break;
        step *= 0.5;
      }
      if (!(trial <= phi - kArmijo * step * dec)) {
        // The decrease is below rounding of phi; near the center a feasible
        // Newton step is still productive.
        if (dec > 1e-6 * (1.0 + std::abs(phi))) return false;
        step = 1.0;
        while (!std::isfinite(trial = trial_at(step)) && step > 1e-12) step *= 0.5;
        if (!std::isfinite(trial)) return false;
      }
      r_.swap(rt);
      e_.swap(et);
      phi = trial;
    }
    return false;
  }

  // Zero out entries the barrier keeps marginally positive. On the central
  // path r * |gain| = tau, so entries below sqrt(tau) are inactive. The
  // effective resource of the user is restored on its best remaining NP where
  // supply allows, since stiff sigmoids are sensitive to tiny shifts in z.
  void snap(double tau) {
    double rmax = 0.0;
    for (double v : r_) rmax = std::max(rmax, v);
    const double thr = std::max(opt_.snap_tol * (1.0 + rmax), std::sqrt(tau));
    auto y = y_of(r_);
    for (int i = 0; i < n_; ++i) {
      if (!live_[i]) continue;
      const auto& beta = p_.terms[i].beta;
      double lost = 0.0;
      int keep = -1;
      for (int k : act_) {
        double& v = r_[static_cast<std::size_t>(i) * K_ + k];
        if (v < thr) {
          lost += beta[k] * v;
          y[k] -= v;
          v = 0.0;
        } else if (keep < 0 || beta[k] > beta[keep]) {
          keep = k;
        }
      }
      if (keep >= 0 && lost > 0.0) {
        const double add = lost / beta[keep];
        const double room = cap_[keep] - y[keep];
        const double hi_room = (p_.terms[i].env.hi - z_of(i, r_)) / beta[keep];
        const double extra = std::min({add, room, hi_room});
        if (extra > 0.0) {
          r_[static_cast<std::size_t>(i) * K_ + keep] += extra;
          y[keep] += extra;
        }
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (elastic_[i]) e_[i] = std::max(p_.terms[i].env.lo - z_of(i, r_), 0.0);
    }
  }

  void finish(AllocSolution& sol, double gap, bool ok) {
    sol.r = r_;
    sol.z.resize(n_);
    for (int i = 0; i < n_; ++i) sol.z[i] = z_of(i, r_);
    sol.y = y_of(r_);
    sol.elastic = e_;
    sol.penalized_objective = penalized();
    double pen = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (elastic_[i]) pen += p_.elastic_penalty * e_[i];
    }
    sol.objective = sol.penalized_objective + pen;
    sol.duality_gap = gap;
    sol.converged = ok;
  }

  const AllocProblem& p_;
  const AllocOptions& opt_;
  int n_ = 0, K_ = 0, Ka_ = 0, m_ = 0;
  std::vector<double> price_, cap_;
  std::vector<int> act_;
  std::vector<char> live_, elastic_;
  std::vector<double> r_, e_, dr_, de_;
  std::vector<int> off_;
  int dim_ = 0;
  MatrixXd hess_;
  VectorXd grad_;
};

}  // namespace

TermValue eval_term(const AllocTerm& term, double z) {
  const auto& env = term.env;
  if (z <= env.bp) {
    return {term.weight * (env.value_lo + env.slope * (z - env.lo)), term.weight * env.slope, 0.0};
  }
  return {term.weight * detail::sigmoid(*term.cls, z), term.weight * detail::sigmoid_d1(*term.cls, z),
          term.weight * detail::sigmoid_d2(*term.cls, z)};
}

double alloc_objective(const AllocProblem& problem, const std::vector<double>& r) {
  const int K = problem.num_nps;
  std::vector<double> y(K, 0.0);
  double f = 0.0;
  for (std::size_t i = 0; i < problem.terms.size(); ++i) {
    double z = 0.0;
    for (int k = 0; k < K; ++k) {
      const double v = r[i * K + k];
      z += problem.terms[i].beta[k] * v;
      y[k] += v;
    }
    f += eval_term(problem.terms[i], z).value;
  }
  for (int k = 0; k < K; ++k) {
    const double price = problem.price.empty() ? 0.0 : problem.price[k];
    f -= price * y[k] + problem.lambda * y[k] * y[k];
  }
  return f;
}

AllocSolution solve_alloc(const AllocProblem& problem, const AllocOptions& options) {
  BarrierSolver solver(problem, options);
  return solver.run();
}

// Moves resources between users sitting on the linear part of their
// relaxed utility so that few of them stay strictly inside it. The linear
// pieces make such transfers free when marginal values tie.
void purify_chords(const AllocProblem& p, std::vector<double>& r) {
  const int n = static_cast<int>(p.terms.size());
  const int K = p.num_nps;
  std::vector<double> z(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) z[i] += p.terms[i].beta[k] * r[static_cast<std::size_t>(i) * K + k];
  }
  auto onchord = [&](int i) {
    const auto& env = p.terms[i].env;
    const double eps = 1e-9 * (1.0 + env.bp);
    return env.bp > env.lo && z[i] > env.lo + eps && z[i] < env.bp - eps;
  };
  const int max_moves = 4 * n * K + 8;
  for (int move = 0; move < max_moves; ++move) {
    bool moved = false;
    for (int k = 0; k < K && !moved; ++k) {
      int recv = -1, donor = -1;
      double rmax = -kInf, rmin = kInf;
      for (int i = 0; i < n; ++i) {
        if (!onchord(i) || r[static_cast<std::size_t>(i) * K + k] <= 0.0) continue;
        const double ratio = p.terms[i].weight * p.terms[i].env.slope * p.terms[i].beta[k];
        const double tie = 1e-9 * std::abs(ratio);
        if (ratio > rmax + tie || (std::abs(ratio - rmax) <= tie && recv >= 0 && z[i] > z[recv])) {
          rmax = std::max(ratio, rmax);
          recv = i;
        }
        if (ratio < rmin - tie || (std::abs(ratio - rmin) <= tie && donor >= 0 && z[i] < z[donor])) {
          rmin = std::min(ratio, rmin);
          donor = i;
        }
      }
      if (recv < 0 || donor < 0 || recv == donor) continue;
      const auto& tr = p.terms[recv];
      const auto& td = p.terms[donor];
      double& rd = r[static_cast<std::size_t>(donor) * K + k];
      const double amount = std::min({rd, (z[donor] - td.env.lo) / td.beta[k],
                                      (tr.env.bp - z[recv]) / tr.beta[k]});
      if (!(amount > 0.0)) continue;
      rd -= amount;
      r[static_cast<std::size_t>(recv) * K + k] += amount;
      z[donor] -= amount * td.beta[k];
      z[recv] += amount * tr.beta[k];
      moved = true;
    }
    if (!moved) break;
  }
}

}  // namespace netslice
