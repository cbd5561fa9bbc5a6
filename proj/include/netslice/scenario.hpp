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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netslice/auction.hpp"
#include "netslice/inference.hpp"
#include "netslice/sigprog.hpp"
#include "netslice/solver.hpp"
#include "netslice/utility.hpp"

namespace netslice {

struct NPSpec {
  std::string id;
  double capacity = 0.0;

  bool operator==(const NPSpec&) const = default;
};

struct MCMCSettings {
  int n_samples = 5000;
  int burn_in = -1;
  double proposal_scale = 0.1;
  int thin = 1;
  // Classes whose parameters are learned; parameters not marked free are
  // held at the class values.
  std::map<std::string, PriorSpec> priors;

  bool operator==(const MCMCSettings&) const = default;
};

struct Scenario {
  std::vector<NPSpec> nps;
  std::vector<ServiceClass> classes;  // true parameters
  std::vector<SPSpec> sps;
  AuctionParams auction;
  bool pricing_enabled = false;
  std::vector<double> overbook_alpha;  // percent per NP; empty means none
  BnBOptions bnb;
  MCMCSettings mcmc;
  std::uint64_t seed = 1;
  int cycles = 1;

  int num_nps() const { return static_cast<int>(nps.size()); }
  std::vector<double> capacity() const;
  const ServiceClass& find_class(const std::string& id) const;

  /// Throws std::invalid_argument naming the offending entry.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

/// Resolves every SP against `catalog` (true classes or current estimates).
Market build_market(const Scenario& scenario, std::span<const ServiceClass> catalog);

}  // namespace netslice
