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

#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "netslice/auction.hpp"
#include "netslice/inference.hpp"
#include "netslice/scenario.hpp"

namespace netslice {

// What the SPs currently believe about each class.
struct MarketState {
  int cycle = 0;
  std::vector<ServiceClass> estimates;
  std::map<std::string, PriorSpec> priors;
};

/// Estimates start at the prior means of the free parameters.
MarketState initial_state(const Scenario& scenario);

struct UserAllocation {
  std::string sp;
  std::string user;
  std::string class_id;
  std::vector<double> r;  // per NP
  double z = 0.0;
  double p = 0.0;
  double expected_revenue = 0.0;
};

struct MethodResult {
  std::string method;
  std::vector<std::vector<double>> x;  // per SP, per NP
  std::vector<UserAllocation> users;
  std::vector<double> revenue;         // per SP
  double total_revenue = 0.0;
  double bound_gap = 0.0;              // branch-and-bound gap where applicable
  std::vector<double> oversell;        // per NP, overbooked methods only
};

struct ClassPosterior {
  std::string class_id;
  std::size_t records = 0;
  Theta mean{};
  Theta std{};
  double acceptance_rate = 0.0;
  double ess_hint = 0.0;
  bool tuning_warning = false;
  PriorSpec prior;      // used in this cycle
  PriorSpec posterior;  // prior of the next cycle
};

struct CycleReport {
  int cycle = 0;
  std::vector<ServiceClass> estimates;  // used for pricing and allocation
  AuctionTrace trace;
  EquilibriumCertificate certificate;
  std::vector<MethodResult> methods;
  std::vector<double> acquired;          // per SP, total over NPs
  std::vector<double> perceived_revenue; // per SP, under estimates
  std::vector<double> actual_revenue;    // per SP, under true parameters
  std::vector<double> realized_revenue;  // per SP, sum of p over satisfied users
  std::vector<FeedbackRecord> feedback;
  std::vector<ClassPosterior> posteriors;
  std::map<std::string, Posterior> samples;
};

/// x * (1 + alpha / 100) componentwise.
std::vector<double> overbook(std::span<const double> x, std::span<const double> alpha);

/// Scales each NP's demand down proportionally where it exceeds supply.
std::vector<std::vector<double>> ration(const std::vector<std::vector<double>>& x,
                                        std::span<const double> capacity);

/// One Bernoulli draw per user with the true satisfaction probability.
std::vector<FeedbackRecord> sample_feedback(std::span<const UserAllocation> allocation,
                                            std::span<const ServiceClass> true_classes, int cycle,
                                            std::mt19937_64& rng);

/// One full market cycle; advances `state`.
CycleReport run_cycle(const Scenario& scenario, MarketState& state);

struct Comparison {
  AuctionTrace trace;
  EquilibriumCertificate certificate;
  std::vector<MethodResult> methods;  // auction, spp, ospp, swm
};

/// Auction, SPP, oSPP(alpha) and SWM allocations under true parameters.
Comparison compare_methods(const Scenario& scenario);

/// Expected revenue of an allocation under `catalog`; fills per-user and
/// per-SP figures.
void price_allocation(MethodResult& result, const Scenario& scenario,
                      std::span<const ServiceClass> catalog);

void write_allocations_csv(std::span<const MethodResult> methods, int num_nps, std::ostream& out);
void write_cycle_reports_json(std::span<const CycleReport> reports, const Scenario& scenario,
                              std::ostream& out);

}  // namespace netslice
