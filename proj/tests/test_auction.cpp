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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "netslice/auction.hpp"
#include "netslice/scenario_io.hpp"
#include "oracles.hpp"

using namespace netslice;

namespace {

const std::string kDir = NETSLICE_SCENARIO_DIR;

Market one_user_market(double capacity, double lambda) {
  std::vector<ServiceClass> cat = {{"a", 0.2, 100.0, 0.0, 0.0}};
  Market m;
  m.capacity = {capacity};
  m.sps.push_back(build_slice({"sp", {{"u", "a", {1.0}, 1.0}}, lambda}, cat, 1, false));
  return m;
}

// Demand of the single-user market from a dense scan of the envelope program.
double scanned_demand(double c, double lambda) {
  const double w = oracle::tangent_point(0.2, 100.0);
  return oracle::scan_argmax([&](double z) { return oracle::envelope(0.2, 100.0, w, z) - c * z - lambda * z * z; }, 0.0,
                             400.0, 40000);
}

}  // namespace

TEST(ExcessDemand, HighPricesLeaveEverythingUnsold) {
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  const Market m = build_market(sc, sc.classes);
  const ExcessDemand ed = excess_demand(m, std::vector<double>{50.0, 50.0, 50.0});
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(ed.Z[k], -m.capacity[k], 1e-6);
}

TEST(ExcessDemand, SingleUserToy) {
  const Scenario sc = load_scenario(kDir + "/toy_single.json");
  Market m = build_market(sc, sc.classes);
  m.capacity = {100.0};
  const ExcessDemand ed = excess_demand(m, std::vector<double>{0.004});
  EXPECT_NEAR(ed.Z[0], scanned_demand(0.004, 1e-6) - 100.0, 1e-4);
  EXPECT_NEAR(ed.Z[0], 19.0, 0.1);
}

TEST(ExcessDemand, SerialAndParallelAreIdentical) {
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  const Market m = build_market(sc, sc.classes);
  const std::vector<double> c = {0.6, 0.62, 0.59};
  const ExcessDemand a = excess_demand(m, c), b = excess_demand_serial(m, c);
  EXPECT_EQ(a.Z, b.Z);
  EXPECT_EQ(a.V, b.V);
}

TEST(Auction, ClearingPriceMatchesBisection) {
  for (double capacity : {100.0, 130.0}) {
    const double lambda = 1e-6;
    double lo = 1e-6, hi = 0.05;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (scanned_demand(mid, lambda) > capacity ? lo : hi) = mid;
    }
    AuctionParams p;
    p.kappa = 1e-6;
    p.c_init = {0.005};
    p.tol = 1e-3;
    p.certify = false;
    const AuctionResult res = run_auction(one_user_market(capacity, lambda), p);
    ASSERT_TRUE(res.trace.converged);
    EXPECT_GT(res.trace.records.back().c[0], 1e-4);
    EXPECT_NEAR(res.trace.records.back().c[0], 0.5 * (lo + hi), 1e-4) << "capacity " << capacity;
  }
}

TEST(Lyapunov, GradientIsMinusExcessDemand) {
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  const Market m = build_market(sc, sc.classes);
  const std::vector<double> c = {0.6, 0.63, 0.57};
  const ExcessDemand ed = excess_demand(m, c);
  EXPECT_NEAR(lyapunov(m, c), ed.V, 1e-9 * std::abs(ed.V));
  for (int k = 0; k < 3; ++k) {
    auto up = c, dn = c;
    up[k] += 1e-6;
    dn[k] -= 1e-6;
    const double fd = (lyapunov(m, up) - lyapunov(m, dn)) / 2e-6;
    EXPECT_NEAR(fd, -ed.Z[k], 1e-3 * (1.0 + std::abs(ed.Z[k])));
  }
}

TEST(Auction, ConvergesFromSeveralStartsToOnePrice) {
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  const Market m = build_market(sc, sc.classes);
  std::vector<std::vector<double>> finals;
  for (const auto& init : std::vector<std::vector<double>>{{0.62, 0.64, 0.58}, {0.3, 0.3, 0.3}, {1.0, 1.0, 1.0}}) {
    AuctionParams p = sc.auction;
    p.c_init = init;
    p.certify = false;
    const AuctionResult res = run_auction(m, p);
    ASSERT_TRUE(res.trace.converged);
    EXPECT_LE(res.trace.records.back().znorm, res.certificate.tol);
    EXPECT_LE(res.trace.records.size(), static_cast<std::size_t>(p.max_iter + 1));
    for (std::size_t t = 0; t + 1 < res.trace.records.size(); ++t) {
      EXPECT_LE(res.trace.records[t + 1].V, res.trace.records[t].V + 1e-9);
    }
    finals.push_back(res.trace.records.back().c);
  }
  for (const auto& f : finals) {
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(f[k], finals[0][k], 1e-3);
  }
}

TEST(Auction, LargeStepIsFlaggedAsOscillating) {
  const Scenario sc = load_scenario(kDir + "/two_provider.json");
  const Market m = build_market(sc, sc.classes);
  AuctionParams p = sc.auction;
  p.kappa = 1e-3;
  p.certify = false;
  const AuctionResult res = run_auction(m, p);
  EXPECT_FALSE(res.trace.converged);
  EXPECT_TRUE(res.trace.oscillating);
  EXPECT_NE(res.trace.diagnostic.find("kappa"), std::string::npos);
  for (const auto& rec : res.trace.records) {
    for (double v : rec.c) EXPECT_GE(v, p.price_floor);
  }
}

TEST(Auction, IterationCapIsReported) {
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  AuctionParams p = sc.auction;
  p.max_iter = 3;
  p.c_init = {0.3, 0.3, 0.3};
  p.certify = false;
  const AuctionResult res = run_auction(build_market(sc, sc.classes), p);
  EXPECT_FALSE(res.trace.converged);
  EXPECT_EQ(res.trace.records.size(), 4u);
  EXPECT_FALSE(res.trace.diagnostic.empty());
}

TEST(Auction, TraceCsvRoundTrips) {
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  AuctionParams p = sc.auction;
  p.max_iter = 5;
  p.certify = false;
  const AuctionResult res = run_auction(build_market(sc, sc.classes), p);
  std::ostringstream out;
  write_trace_csv(res.trace, 3, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iter,c_1,c_2,c_3,Z_1,Z_2,Z_3,Znorm,V");
  for (const auto& rec : res.trace.records) {
    ASSERT_TRUE(std::getline(in, line));
    std::vector<double> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(std::stod(cell));
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_EQ(cells[0], static_cast<double>(rec.iter));
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(cells[1 + k], rec.c[k]);
      EXPECT_EQ(cells[4 + k], rec.Z[k]);
    }
    EXPECT_EQ(cells[7], rec.znorm);
    EXPECT_EQ(cells[8], rec.V);
  }
}

TEST(Certificate, BandHoldsAgainstBruteForce) {
  const Scenario sc = load_scenario(kDir + "/toy_band.json");
  const Market m = build_market(sc, sc.classes);
  const SliceModel& sp = m.sps[0];
  const std::vector<double> c = {0.004};
  const auto profit = [&](const std::vector<double>& r, double lambda) {
    double f = 0.0, x = r[0] + r[1];
    for (int i = 0; i < 2; ++i) f += sp.weights[i] * oracle::sigmoid(sp.classes[i].t_z, sp.classes[i].k, sp.beta[i][0] * r[i]);
    return f - c[0] * x - lambda * x * x;
  };
  const auto all = [](const std::vector<double>&) { return true; };
  const auto star = oracle::grid_maximize(2, {300.0, 300.0}, all, [&](const auto& r) { return profit(r, 0.0); }, 301);
  const auto bar = oracle::grid_maximize(2, {300.0, 300.0}, all, [&](const auto& r) { return profit(r, sp.lambda); }, 301);
  const DemandResult d = solve_demand(sp, c);
  const double xhat = d.x[0];
  const double xs = star.x[0] + star.x[1], xb = bar.x[0] + bar.x[1];
  const double realized = sp_profit(sp, c, d.r);
  std::vector<WeightedClass> wc;
  for (std::size_t i = 0; i < sp.size(); ++i) wc.push_back({sp.weights[i], sp.classes[i]});
  const double eps = epsilon_bound(wc, 1);
  const double d1 = sp.lambda * (xs * xs - xhat * xhat);
  const double d2 = sp.lambda * (xhat * xhat - xb * xb);
  EXPECT_GE(realized, star.value - eps - d1 - 1e-9);
  EXPECT_LE(realized, star.value + d2 + 1e-9);

  const EquilibriumCertificate cert = verify_equilibrium(m, c, 1e9);
  ASSERT_EQ(cert.sps.size(), 1u);
  EXPECT_NEAR(cert.sps[0].psi_star, star.value, 1e-6);
  EXPECT_NEAR(cert.sps[0].realized, realized, 1e-12);
  EXPECT_TRUE(cert.sps[0].in_band);
}
