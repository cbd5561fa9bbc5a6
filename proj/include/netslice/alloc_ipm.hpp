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

#pragma once

#include <limits>
#include <vector>

#include "netslice/utility.hpp"

namespace netslice {

// One user inside a concave allocation program: the objective term is
// weight * h(beta^T r) where h is the concave majorant `env` of the class
// sigmoid on [env.lo, env.hi].
struct AllocTerm {
  const ServiceClass* cls = nullptr;
  double weight = 1.0;
  IntervalEnvelope env;
  std::vector<double> beta;
};

// maximize  sum_i weight_i * h_i(z_i) - sum_k (price_k * y_k + lambda * y_k^2)
// s.t.      z_i = beta_i^T r_i,  r >= 0,  y = sum_i r_i,  y <= capacity,
//           z_i <= env.hi,  z_i >= env.lo (elastic, penalised by elastic_penalty).
struct AllocProblem {
  int num_nps = 0;
  std::vector<AllocTerm> terms;
  std::vector<double> price;     // empty means zero
  double lambda = 0.0;
  std::vector<double> capacity;  // empty means unbounded; +inf entries allowed
  double elastic_penalty = 0.0;
};

struct AllocOptions {
  double gap_tol = 1e-12;   // relative to 1 + sum of weights
  int max_newton = 2000;
  double snap_tol = 1e-7;   // r entries below snap_tol * (1 + max r) are zeroed
  std::vector<double> start;  // optional initial r, user-major; used when strictly feasible
};

struct AllocSolution {
  std::vector<double> r;  // user-major, terms.size() * num_nps
  std::vector<double> z;
  std::vector<double> y;
  std::vector<double> elastic;
  double objective = 0.0;            // without the elastic penalty
  double penalized_objective = 0.0;  // with it; upper bound minus duality_gap
  double duality_gap = 0.0;          // barrier bound on suboptimality
  int newton_steps = 0;
  bool converged = false;
};

AllocSolution solve_alloc(const AllocProblem& problem, const AllocOptions& options = {});

// weight * h(z) and its first two derivatives.
struct TermValue {
  double value;
  double d1;
  double d2;
};
TermValue eval_term(const AllocTerm& term, double z);

// Value of the concave program's objective at r (no elastic penalty).
double alloc_objective(const AllocProblem& problem, const std::vector<double>& r);

/// Shifts resources among users on the linear part of their envelope,
/// NP by NP, toward the highest marginal value. The relaxed objective is
/// unchanged when those marginal values tie.
void purify_chords(const AllocProblem& problem, std::vector<double>& r);

}  // namespace netslice
