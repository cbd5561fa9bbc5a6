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

#include <span>
#include <string>
#include <vector>

#include "netslice/alloc_ipm.hpp"
#include "netslice/utility.hpp"

namespace netslice {

struct SPSpec {
  std::string id;
  std::vector<UserSpec> users;
  double lambda = 0.0;  // regularization weight, must be > 0

  bool operator==(const SPSpec&) const = default;
};

// An SP with every user resolved against the class catalog: class parameters,
// effective weight and concave envelope.
struct SliceModel {
  std::string id;
  int num_nps = 0;
  double lambda = 0.0;
  std::vector<ServiceClass> classes;  // per user
  std::vector<double> weights;        // per user, pricing weight folded in
  std::vector<std::vector<double>> beta;
  std::vector<Envelope> envelopes;

  std::size_t size() const { return classes.size(); }
};

/// Resolves the SP's users. With `pricing` the weight of user i becomes
/// users[i].weight * pricing_weight(class). Throws std::invalid_argument on an
/// unknown class id, a beta of the wrong length or out of (0, 1], or lambda <= 0.
SliceModel build_slice(const SPSpec& sp, std::span<const ServiceClass> catalog, int num_nps,
                       bool pricing);

struct DemandOptions {
  double tol = 1e-7;  // KKT residual target
  int max_iter = 2000;
  std::vector<double> start;  // optional initial r, user-major
};

struct DemandResult {
  std::vector<double> x;               // per NP
  std::vector<std::vector<double>> r;  // per user, per NP
  std::vector<double> z;               // per user
  double value = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Maximizes sum_i w_i * envelope_i(beta_i^T r_i) - c^T x - lambda |x|^2 with
/// x = sum_i r_i, r >= 0.
DemandResult solve_demand(const SliceModel& sp, std::span<const double> c,
                          const DemandOptions& options = {});

/// Concavified aggregate utility: best envelope value reachable with at most
/// x_k of resource k.
double eval_U(const SliceModel& sp, std::span<const double> x);

/// Max violation of the demand program's optimality conditions. Marginal
/// conditions are divided by max(1, max_i w_i t_z,i beta_ik / 4), the steepest
/// marginal utility in the slice.
double kkt_residual(const SliceModel& sp, std::span<const double> c, const DemandResult& result);

/// Optimal value of the demand program at prices c.
double net_indirect_utility(const SliceModel& sp, std::span<const double> c);

/// Value of the demand objective at r (x = sum r).
double demand_objective(const SliceModel& sp, std::span<const double> c,
                        const std::vector<std::vector<double>>& r);

/// Gradient of demand_objective with respect to r (same shape as r).
std::vector<std::vector<double>> demand_gradient(const SliceModel& sp, std::span<const double> c,
                                                 const std::vector<std::vector<double>>& r);

/// Allocation terms for the global envelopes of the SP's users.
std::vector<AllocTerm> envelope_terms(const SliceModel& sp);

}  // namespace netslice
