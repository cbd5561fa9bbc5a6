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
#include <vector>

#include "netslice/solver.hpp"
#include "netslice/utility.hpp"

namespace netslice {

struct SigTerm {
  ServiceClass cls;
  double weight = 1.0;
  std::vector<double> beta;
  int group = 0;  // owning SP when several share the instance
};

// maximize sum_i weight_i * u_i(beta_i^T r_i) - price^T y - lambda |y|^2
// s.t. y = sum_i r_i <= capacity, r >= 0.
struct SigProgInstance {
  int num_nps = 0;
  std::vector<SigTerm> users;
  std::vector<double> capacity;  // empty or +inf entries mean unbounded
  std::vector<double> price;     // empty means zero
  double lambda = 0.0;
};

struct BnBOptions {
  double tol = 0.0;  // absolute; <= 0 selects 1e-3 * sum of weights
  long node_budget = 100000;
  int batch = 8;     // nodes expanded per parallel round
  bool parallel = true;
  bool record_trace = false;

  bool operator==(const BnBOptions&) const = default;
};

struct BnBTracePoint {
  long nodes;
  double incumbent;
  double upper_bound;
};

struct SigProgResult {
  std::vector<std::vector<double>> r;  // per user, per NP
  std::vector<double> z;
  std::vector<double> y;
  double value = 0.0;        // true objective at r
  double upper_bound = 0.0;  // certified bound on the optimum
  double gap = 0.0;          // upper_bound - value
  double tol = 0.0;
  long nodes = 0;
  bool optimal = false;      // gap <= tol
  std::vector<BnBTracePoint> trace;
};

SigProgResult maximize_sum_sigmoids(const SigProgInstance& instance, const BnBOptions& options = {});

/// Exact intra-slice allocation of the SP's users under supply x.
SigProgResult solve_in_sl(const SliceModel& sp, std::span<const double> x,
                          const BnBOptions& options = {});

/// Centralized welfare maximization over every SP's users under supply C.
/// Groups in the result's users follow the order of `sps`.
SigProgResult solve_swm(std::span<const SliceModel> sps, std::span<const double> capacity,
                        const BnBOptions& options = {});

/// Exact (non-concavified) SP profit program at prices c: the sigmoid
/// counterpart of solve_demand.
SigProgResult solve_exact_demand(const SliceModel& sp, std::span<const double> c,
                                 const BnBOptions& options = {});

/// The sigmoid objective of `instance` at r (per user, per NP).
double sigprog_objective(const SigProgInstance& instance, const std::vector<std::vector<double>>& r);

}  // namespace netslice
