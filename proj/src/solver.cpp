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

#include "netslice/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace netslice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IntervalEnvelope as_interval(const Envelope& env) {
  return {0.0, kInf, env.w, env.u0, env.slope};
}

void check_prices(const SliceModel& sp, std::span<const double> c) {
  if (static_cast<int>(c.size()) != sp.num_nps) {
    throw std::invalid_argument("price vector has the wrong dimension");
  }
}

std::vector<double> flatten(const SliceModel& sp, const std::vector<std::vector<double>>& r) {
  std::vector<double> flat;
  flat.reserve(sp.size() * sp.num_nps);
  for (const auto& row : r) flat.insert(flat.end(), row.begin(), row.end());
  return flat;
}

}  // namespace

SliceModel build_slice(const SPSpec& sp, std::span<const ServiceClass> catalog, int num_nps,
                       bool pricing) {
  if (!(sp.lambda > 0.0)) {
    throw std::invalid_argument("sp '" + sp.id + "': lambda must be > 0");
  }
  SliceModel m;
  m.id = sp.id;
  m.num_nps = num_nps;
  m.lambda = sp.lambda;
  for (const auto& u : sp.users) {
    auto it = std::find_if(catalog.begin(), catalog.end(),
                           [&](const ServiceClass& c) { return c.id == u.class_id; });
    if (it == catalog.end()) {
      throw std::invalid_argument("user '" + u.id + "': unknown class '" + u.class_id + "'");
    }
    if (static_cast<int>(u.beta.size()) != num_nps) {
      throw std::invalid_argument("user '" + u.id + "': beta must have " +
                                  std::to_string(num_nps) + " entries");
    }
    for (double b : u.beta) {
      if (!(b > 0.0 && b <= 1.0)) {
        throw std::invalid_argument("user '" + u.id + "': beta entries must lie in (0, 1]");
      }
    }
    if (!(u.weight >= 0.0)) throw std::invalid_argument("user '" + u.id + "': weight must be >= 0");
    m.classes.push_back(*it);
    m.weights.push_back(u.weight * (pricing ? pricing_weight(*it) : 1.0));
    m.beta.push_back(u.beta);
    m.envelopes.push_back(build_envelope(*it));
  }
  return m;
}

std::vector<AllocTerm> envelope_terms(const SliceModel& sp) {
  std::vector<AllocTerm> terms(sp.size());
  for (std::size_t i = 0; i < sp.size(); ++i) {
    terms[i].cls = &sp.classes[i];
    terms[i].weight = sp.weights[i];
    terms[i].env = as_interval(sp.envelopes[i]);
    terms[i].beta = sp.beta[i];
  }
  return terms;
}

DemandResult solve_demand(const SliceModel& sp, std::span<const double> c,
                          const DemandOptions& options) {
  check_prices(sp, c);
  AllocProblem prob;
  prob.num_nps = sp.num_nps;
  prob.terms = envelope_terms(sp);
  prob.price.assign(c.begin(), c.end());
  prob.lambda = sp.lambda;
  AllocOptions ao;
  ao.max_newton = options.max_iter;
  ao.start = options.start;
  AllocSolution sol = solve_alloc(prob, ao);
  purify_chords(prob, sol.r);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    sol.z[i] = 0.0;
    for (int k = 0; k < sp.num_nps; ++k) sol.z[i] += sp.beta[i][k] * sol.r[i * sp.num_nps + k];
  }

  DemandResult res;
  const int K = sp.num_nps;
  res.x = sol.y;
  res.z = sol.z;
  res.r.resize(sp.size());
  for (std::size_t i = 0; i < sp.size(); ++i) {
    res.r[i].assign(sol.r.begin() + i * K, sol.r.begin() + (i + 1) * K);
  }
  res.value = sol.objective;
  res.iterations = sol.newton_steps;
  res.kkt_residual = kkt_residual(sp, c, res);
  res.converged = sol.converged && res.kkt_residual <= options.tol;
  return res;
}

double eval_U(const SliceModel& sp, std::span<const double> x) {
  check_prices(sp, x);
  AllocProblem prob;
  prob.num_nps = sp.num_nps;
  prob.terms = envelope_terms(sp);
  prob.capacity.assign(x.begin(), x.end());
  for (double v : x) {
    if (!(v >= 0.0)) throw std::invalid_argument("resource vector must be nonnegative");
  }
  return solve_alloc(prob).objective;
}

std::vector<std::vector<double>> demand_gradient(const SliceModel& sp, std::span<const double> c,
                                                 const std::vector<std::vector<double>>& r) {
  const int K = sp.num_nps;
  std::vector<double> x(K, 0.0);
  for (const auto& row : r) {
    for (int k = 0; k < K; ++k) x[k] += row[k];
  }
  std::vector<std::vector<double>> g(sp.size(), std::vector<double>(K));
  for (std::size_t i = 0; i < sp.size(); ++i) {
    double z = 0.0;
    for (int k = 0; k < K; ++k) z += sp.beta[i][k] * r[i][k];
    const double d = sp.weights[i] * envelope_eval(sp.envelopes[i], sp.classes[i], std::max(z, 0.0)).derivative;
    for (int k = 0; k < K; ++k) g[i][k] = d * sp.beta[i][k] - c[k] - 2.0 * sp.lambda * x[k];
  }
  return g;
}

double demand_objective(const SliceModel& sp, std::span<const double> c,
                        const std::vector<std::vector<double>>& r) {
  check_prices(sp, c);
  AllocProblem prob;
  prob.num_nps = sp.num_nps;
  prob.terms = envelope_terms(sp);
  prob.price.assign(c.begin(), c.end());
  prob.lambda = sp.lambda;
  return alloc_objective(prob, flatten(sp, r));
}

double kkt_residual(const SliceModel& sp, std::span<const double> c, const DemandResult& result) {
  check_prices(sp, c);
  const int K = sp.num_nps;
  double res = 0.0;
  std::vector<double> sum(K, 0.0);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    double z = 0.0;
    for (int k = 0; k < K; ++k) {
      const double v = result.r[i][k];
      res = std::max(res, -v);
      sum[k] += v;
      z += sp.beta[i][k] * v;
    }
    res = std::max(res, std::abs(z - result.z[i]));
  }
  for (int k = 0; k < K; ++k) {
    res = std::max(res, std::abs(sum[k] - result.x[k]));
  }
  // Marginal conditions are measured against the steepest marginal utility.
  double scale = 1.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    for (int k = 0; k < K; ++k) scale = std::max(scale, sp.weights[i] * sp.classes[i].t_z / 4.0 * sp.beta[i][k]);
  }
  // r-stationarity with nonnegativity multipliers.
  const auto g = demand_gradient(sp, c, result.r);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    for (int k = 0; k < K; ++k) {
      res = std::max(res, std::abs(std::min(std::max(result.r[i][k], 0.0), -g[i][k] / scale)));
    }
  }
  // Per-NP alternative: x_k = 0 or marginal utility equals the marginal cost.
  for (int k = 0; k < K; ++k) {
    double mu = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
      const double d = envelope_eval(sp.envelopes[i], sp.classes[i], std::max(result.z[i], 0.0)).derivative;
      mu = std::max(mu, sp.weights[i] * d * sp.beta[i][k]);
    }
    const double slack = (mu - c[k] - 2.0 * sp.lambda * result.x[k]) / scale;
    if (result.x[k] > 0.0) {
      res = std::max(res, std::min(result.x[k], std::abs(slack)));
    } else {
      res = std::max(res, std::max(0.0, slack));
    }
  }
  return res;
}

double net_indirect_utility(const SliceModel& sp, std::span<const double> c) {
  return solve_demand(sp, c).value;
}

}  // namespace netslice
