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
#include <span>
#include <string>
#include <vector>

#include "netslice/sigprog.hpp"
#include "netslice/solver.hpp"

namespace netslice {

// The price-formation view of a market: NP supplies and resolved SPs.
struct Market {
  std::vector<double> capacity;
  std::vector<SliceModel> sps;

  int num_nps() const { return static_cast<int>(capacity.size()); }
};

struct AuctionParams {
  double kappa = 1e-4;
  std::vector<double> c_init;  // empty: every component at 1
  double tol = 0.0;            // on |Z|_2; <= 0 selects default_tolerance()
  long max_iter = 100000;
  double price_floor = 1e-6;
  int window = 100;            // oscillation detection span
  bool certify = true;

  bool operator==(const AuctionParams&) const = default;
};

struct AuctionRecord {
  long iter = 0;
  std::vector<double> c;
  std::vector<double> Z;
  double znorm = 0.0;
  double V = 0.0;
};

struct AuctionTrace {
  std::vector<AuctionRecord> records;
  bool converged = false;
  bool oscillating = false;
  bool demand_converged = true;  // every demand solve met its tolerance
  long iterations = 0;
  std::string diagnostic;
};

struct SPCertificate {
  std::string sp;
  double epsilon = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double psi_star = 0.0;      // best known profit of the exact program
  double psi_star_gap = 0.0;  // its branch-and-bound gap
  double profit_lo = 0.0;
  double profit_hi = 0.0;
  double realized = 0.0;      // sigmoid profit at the concavified demand
  bool in_band = false;
};

struct EquilibriumCertificate {
  std::vector<double> c_dagger;
  double excess_norm = 0.0;
  double tol = 0.0;
  std::vector<double> supply_gap;
  std::vector<SPCertificate> sps;
  std::vector<DemandResult> demands;
  bool supply_ok = false;
  bool bands_ok = false;
  bool valid = false;
};

struct ExcessDemand {
  std::vector<double> Z;
  std::vector<DemandResult> demands;
  double V = 0.0;  // Lyapunov value at the same prices
  bool converged = true;
};

/// 1e-2 * |C|_2 / sqrt(K).
double default_tolerance(const Market& market);

/// Aggregate demand minus supply; SP demands are solved in parallel.
ExcessDemand excess_demand(const Market& market, std::span<const double> c);
/// Sequential reference for excess_demand.
ExcessDemand excess_demand_serial(const Market& market, std::span<const double> c);

/// c^T C + sum_m V_m(c).
double lyapunov(const Market& market, std::span<const double> c);

struct AuctionResult {
  AuctionTrace trace;
  EquilibriumCertificate certificate;
};

AuctionResult run_auction(const Market& market, const AuctionParams& params,
                          const BnBOptions& bnb = {});

/// Supply check plus per-SP profit bands at prices c.
EquilibriumCertificate verify_equilibrium(const Market& market, std::span<const double> c,
                                          double tol, const BnBOptions& bnb = {});

/// Profit of the SP's sigmoid program at r with x = sum r.
double sp_profit(const SliceModel& sp, std::span<const double> c,
                 const std::vector<std::vector<double>>& r);

/// Header `iter,c_1..c_K,Z_1..Z_K,Znorm,V`, one row per record.
void write_trace_csv(const AuctionTrace& trace, int num_nps, std::ostream& out);

}  // namespace netslice
