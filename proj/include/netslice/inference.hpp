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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netslice/utility.hpp"

namespace netslice {

struct FeedbackRecord {
  std::string user_id;
  int cycle = 0;
  double z = 0.0;
  double p = 0.0;  // 0 when pricing is disabled; the price factor is then 1
  bool satisfied = false;

  bool operator==(const FeedbackRecord&) const = default;
};

// Parameter order used throughout: t_p, b, t_z, k.
enum Param : int { kTp = 0, kB = 1, kTz = 2, kK = 3 };
inline constexpr std::array<const char*, 4> kParamNames = {"t_p", "b", "t_z", "k"};

using Theta = std::array<double, 4>;

Theta theta_of(const ServiceClass& cls);
ServiceClass with_theta(ServiceClass cls, const Theta& theta);

// Normal prior truncated at zero. Parameters that are not free are held at
// `mean`.
struct ParamPrior {
  double mean = 0.0;
  double std = 1.0;
  bool free = false;

  bool operator==(const ParamPrior&) const = default;
};

struct PriorSpec {
  std::array<ParamPrior, 4> params;

  bool operator==(const PriorSpec&) const = default;
};

/// A prior that fixes every parameter at the class values.
PriorSpec fixed_prior(const ServiceClass& cls);

struct MCMCOptions {
  int n_samples = 5000;
  int burn_in = -1;             // < 0 selects 20% of n_samples
  double proposal_scale = 0.1;  // proposal std as a multiple of the prior std
  int thin = 1;                 // chain steps per recorded sample
  std::uint64_t seed = 1;
};

struct Posterior {
  std::vector<Theta> samples;
  Theta mean{};
  Theta std{};
  double acceptance_rate = 0.0;
  double ess_hint = 0.0;
  bool tuning_warning = false;  // acceptance below 1%
};

/// Probability of satisfaction at (z, p) under theta.
double satisfaction_probability(const Theta& theta, double z, double p);

double log_likelihood(const Theta& theta, std::span<const FeedbackRecord> data);

Posterior metropolis_sample(const PriorSpec& prior, std::span<const FeedbackRecord> data,
                            const MCMCOptions& options);

/// Moment-matched normal prior for the free parameters (std floored at
/// `std_floor`); fixed parameters are copied from `previous`.
PriorSpec update_prior(const Posterior& posterior, const PriorSpec& previous, double std_floor = 1e-3);

/// Header `sample_index,t_p,b,t_z,k`, one row per sample, then a `mean` row.
void write_posterior_csv(const Posterior& posterior, std::ostream& out);

/// Header `user,cycle,z,p,satisfied`; satisfied is 0 or 1.
void write_feedback_csv(std::span<const FeedbackRecord> records, std::ostream& out);

/// Reads the format above. Throws std::runtime_error naming the line.
std::vector<FeedbackRecord> read_feedback_csv(std::istream& in);

}  // namespace netslice
