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

#include "netslice/auction.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace netslice {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void check(const Market& market, std::span<const double> c) {
  if (static_cast<int>(c.size()) != market.num_nps()) {
    throw std::invalid_argument("price vector has the wrong dimension");
  }
}

ExcessDemand assemble(const Market& market, std::span<const double> c, std::vector<DemandResult> demands) {
  ExcessDemand ed;
  const int K = market.num_nps();
  ed.Z.assign(K, 0.0);
  ed.V = 0.0;
  for (int k = 0; k < K; ++k) {
    ed.Z[k] = -market.capacity[k];
    ed.V += c[k] * market.capacity[k];
  }
  for (const auto& d : demands) {
    for (int k = 0; k < K; ++k) ed.Z[k] += d.x[k];
    ed.V += d.value;
    ed.converged = ed.converged && d.converged;
  }
  ed.demands = std::move(demands);
  return ed;
}

}  // namespace

double default_tolerance(const Market& market) {
  return 1e-2 * norm2(market.capacity) / std::sqrt(static_cast<double>(std::max(1, market.num_nps())));
}

ExcessDemand excess_demand(const Market& market, std::span<const double> c) {
  check(market, c);
  const int m = static_cast<int>(market.sps.size());
  std::vector<DemandResult> demands(m);
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < m; ++j) demands[j] = solve_demand(market.sps[j], c);
  return assemble(market, c, std::move(demands));
}

ExcessDemand excess_demand_serial(const Market& market, std::span<const double> c) {
  check(market, c);
  std::vector<DemandResult> demands;
  demands.reserve(market.sps.size());
  for (const auto& sp : market.sps) demands.push_back(solve_demand(sp, c));
  return assemble(market, c, std::move(demands));
}

double lyapunov(const Market& market, std::span<const double> c) {
  return excess_demand(market, c).V;
}

double sp_profit(const SliceModel& sp, std::span<const double> c,
                 const std::vector<std::vector<double>>& r) {
  double f = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    double z = 0.0;
    for (int k = 0; k < sp.num_nps; ++k) {
      z += sp.beta[i][k] * r[i][k];
      f -= c[k] * r[i][k];
    }
    f += sp.weights[i] * detail::sigmoid(sp.classes[i], z);
  }
  return f;
}

AuctionResult run_auction(const Market& market, const AuctionParams& params, const BnBOptions& bnb) {
  const int K = market.num_nps();
  if (!(params.kappa > 0.0) || !(params.price_floor > 0.0)) {
    throw std::invalid_argument("kappa and price_floor must be positive");
  }
  std::vector<double> c = params.c_init;
  if (c.empty()) c.assign(K, 1.0);
  check(market, c);
  for (double& v : c) v = std::max(v, params.price_floor);
  const double tol = params.tol > 0.0 ? params.tol : default_tolerance(market);

  AuctionResult out;
  AuctionTrace& trace = out.trace;
  double best_before = std::numeric_limits<double>::infinity();
  ExcessDemand ed;
  for (long t = 0;; ++t) {
    ed = excess_demand(market, c);
    trace.demand_converged = trace.demand_converged && ed.converged;
    const double zn = norm2(ed.Z);
    trace.records.push_back({t, c, ed.Z, zn, ed.V});
    trace.iterations = t;
    if (zn <= tol) {
      trace.converged = true;
      break;
    }
    if (t >= params.max_iter) {
      trace.diagnostic = "iteration cap reached";
      break;
    }
    const long w = params.window;
    if (w > 0 && t >= w) {
      best_before = std::min(best_before, trace.records[t - w].znorm);
      double recent = std::numeric_limits<double>::infinity();
      for (long s = t - w + 1; s <= t; ++s) recent = std::min(recent, trace.records[s].znorm);
      if (recent >= best_before) {
        trace.oscillating = true;
        trace.diagnostic = fmt::format("excess demand stopped decreasing over {} iterations; kappa {} is likely too large",
                                       w, params.kappa);
        break;
      }
    }
    for (int k = 0; k < K; ++k) c[k] = std::max(params.price_floor, c[k] + params.kappa * ed.Z[k]);
  }
  if (params.certify) {
    out.certificate = verify_equilibrium(market, trace.records.back().c, tol, bnb);
  } else {
    auto& cert = out.certificate;
    cert.c_dagger = trace.records.back().c;
    cert.excess_norm = trace.records.back().znorm;
    cert.tol = tol;
    cert.demands = std::move(ed.demands);
  }
  return out;
}

EquilibriumCertificate verify_equilibrium(const Market& market, std::span<const double> c, double tol,
                                          const BnBOptions& bnb) {
  check(market, c);
  const int K = market.num_nps();
  EquilibriumCertificate cert;
  cert.c_dagger.assign(c.begin(), c.end());
  cert.tol = tol;
  ExcessDemand ed = excess_demand(market, c);
  cert.excess_norm = norm2(ed.Z);
  cert.supply_gap.resize(K);
  cert.supply_ok = true;
  for (int k = 0; k < K; ++k) {
    cert.supply_gap[k] = std::abs(ed.Z[k]);
    cert.supply_ok = cert.supply_ok && cert.supply_gap[k] <= tol;
  }
  cert.bands_ok = true;
  for (std::size_t m = 0; m < market.sps.size(); ++m) {
    const SliceModel& sp = market.sps[m];
    const DemandResult& d = ed.demands[m];
    SPCertificate sc;
    sc.sp = sp.id;
    std::vector<WeightedClass> wc;
    double scale = 1.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
      wc.push_back({sp.weights[i], sp.classes[i]});
      scale += sp.weights[i];
    }
    sc.epsilon = epsilon_bound(wc, K);
    SliceModel unregularized = sp;
    unregularized.lambda = 0.0;
    const SigProgResult exact = solve_exact_demand(unregularized, c, bnb);
    const SigProgResult regular = solve_exact_demand(sp, c, bnb);
    const double xhat = sq(d.x);
    sc.delta1 = sp.lambda * (sq(exact.y) - xhat);
    sc.delta2 = sp.lambda * (xhat - sq(regular.y));
    sc.psi_star = exact.value;
    sc.psi_star_gap = exact.gap;
    sc.profit_lo = exact.value - sc.epsilon - sc.delta1;
    sc.profit_hi = exact.value + exact.gap + sc.delta2;
    sc.realized = sp_profit(sp, c, d.r);
    const double slack = 1e-9 * scale;
    sc.in_band = sc.profit_lo - slack <= sc.realized && sc.realized <= sc.profit_hi + slack;
    cert.bands_ok = cert.bands_ok && sc.in_band;
    cert.sps.push_back(sc);
  }
  cert.demands = std::move(ed.demands);
  cert.valid = cert.supply_ok && cert.bands_ok;
  return cert;
}

void write_trace_csv(const AuctionTrace& trace, int num_nps, std::ostream& out) {
  out << "iter";
  for (int k = 1; k <= num_nps; ++k) out << ",c_" << k;
  for (int k = 1; k <= num_nps; ++k) out << ",Z_" << k;
  out << ",Znorm,V\n";
  for (const auto& rec : trace.records) {
    out << rec.iter;
    for (double v : rec.c) fmt::print(out, ",{}", v);
    for (double v : rec.Z) fmt::print(out, ",{}", v);
    fmt::print(out, ",{},{}\n", rec.znorm, rec.V);
  }
}

}  // namespace netslice
