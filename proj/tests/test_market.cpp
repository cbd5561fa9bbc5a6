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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "netslice/market.hpp"
#include "netslice/scenario_io.hpp"

using namespace netslice;

namespace {

const std::string kDir = NETSLICE_SCENARIO_DIR;

const MethodResult& method(const Comparison& c, const std::string& name) {
  for (const auto& m : c.methods) {
    if (m.method == name) return m;
  }
  throw std::out_of_range(name);
}

double column(const std::vector<std::vector<double>>& x, int k) {
  double s = 0.0;
  for (const auto& row : x) s += row[k];
  return s;
}

}  // namespace

TEST(Market, OverbookScalesComponentwise) {
  const std::vector<double> x = {100.0, 40.0}, a = {5.0, 0.0};
  const auto y = overbook(x, a);
  EXPECT_DOUBLE_EQ(y[0], 105.0);
  EXPECT_DOUBLE_EQ(y[1], 40.0);
  const std::vector<double> bad = {-1.0, 0.0};
  EXPECT_THROW(overbook(x, bad), std::invalid_argument);
}

TEST(Market, RationingConservesSupply) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> x(4, std::vector<double>(3));
    for (auto& row : x)
      for (auto& v : row) v = U(rng);
    const std::vector<double> cap = {U(rng) + 1.0, U(rng) * 4.0 + 1.0, 500.0};
    const auto y = ration(x, cap);
    for (int k = 0; k < 3; ++k) {
      const double want = std::min(column(x, k), cap[k]);
      EXPECT_NEAR(column(y, k), want, 1e-9 * (1.0 + want));
      for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_LE(y[i][k], x[i][k] + 1e-12);
        if (column(x, k) > cap[k]) {
          EXPECT_NEAR(y[i][k] / cap[k], x[i][k] / column(x, k), 1e-12);
        }
      }
    }
  }
}

TEST(Market, FeedbackFollowsTruth) {
  const ServiceClass c{"c", 2.0, 120.0, 0.0, 0.0};
  std::vector<UserAllocation> users;
  for (int i = 0; i < 4000; ++i) users.push_back({"SP1", "u" + std::to_string(i), "c", {}, 120.5, 0.0, 0.0});
  std::mt19937_64 rng(4);
  const std::vector<ServiceClass> truth = {c};
  const auto fb = sample_feedback(users, truth, 2, rng);
  ASSERT_EQ(fb.size(), users.size());
  const double hits = std::count_if(fb.begin(), fb.end(), [](const auto& r) { return r.satisfied; });
  const double p = 1.0 / (1.0 + std::exp(-1.0));
  EXPECT_NEAR(hits / fb.size(), p, 4.0 * std::sqrt(p * (1 - p) / fb.size()));
  EXPECT_EQ(fb.front().cycle, 2);
}

TEST(Market, ComparisonOnTwoProviders) {
  const Scenario sc = load_scenario(kDir + "/two_provider.json");
  const Comparison cmp = compare_methods(sc);
  ASSERT_EQ(cmp.methods.size(), 4u);
  EXPECT_TRUE(cmp.trace.converged);
  const auto cap = sc.capacity();
  for (const char* name : {"auction", "spp", "swm"}) {
    const auto& m = method(cmp, name);
    for (int k = 0; k < sc.num_nps(); ++k) EXPECT_LE(column(m.x, k), cap[k] * (1 + 1e-6)) << name;
  }
  // SP1's users are poorly served by NP2 and get nothing there.
  for (const auto& m : cmp.methods) {
    for (const auto& u : m.users) {
      if (u.sp == "SP1") EXPECT_NEAR(u.r[1], 0.0, 1e-6) << m.method;
    }
  }
  const auto& ospp = method(cmp, "ospp");
  for (int k = 0; k < sc.num_nps(); ++k) {
    EXPECT_GE(ospp.oversell[k], 0.0);
    EXPECT_LE(ospp.oversell[k], cap[k] * sc.overbook_alpha[k] / 100.0 + 1e-6);
  }
  EXPECT_GE(method(cmp, "spp").total_revenue, method(cmp, "auction").total_revenue);
  EXPECT_GE(ospp.total_revenue, method(cmp, "spp").total_revenue);
}

TEST(Market, OverbookingServesTheWorstUser) {
  const Scenario sc = load_scenario(kDir + "/two_provider.json");
  const Comparison cmp = compare_methods(sc);
  const auto worst = [](const MethodResult& m) {
    double lo = 1e300;
    for (const auto& u : m.users) {
      if (u.sp == "SP1") lo = std::min(lo, u.z);
    }
    return lo;
  };
  EXPECT_GT(worst(method(cmp, "ospp")), worst(method(cmp, "spp")));
}

TEST(Market, CyclesAreDeterministicAndLearn) {
  Scenario sc = load_scenario(kDir + "/learning.json");
  sc.cycles = 2;
  sc.mcmc.n_samples = 2000;
  sc.mcmc.burn_in = 400;
  MarketState s1 = initial_state(sc), s2 = initial_state(sc);
  std::vector<CycleReport> r1, r2;
  for (int i = 0; i < 2; ++i) {
    r1.push_back(run_cycle(sc, s1));
    r2.push_back(run_cycle(sc, s2));
  }
  EXPECT_EQ(s1.cycle, 2);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(r1[i].feedback, r2[i].feedback);
    EXPECT_EQ(r1[i].acquired, r2[i].acquired);
  }
  const auto& p1 = r1[0].posteriors.front();
  const auto& p2 = r1[1].posteriors.front();
  EXPECT_LT(p1.posterior.params[kTz].std, p1.prior.params[kTz].std);
  EXPECT_LT(p2.posterior.params[kTz].std, p2.prior.params[kTz].std);
  EXPECT_EQ(p2.prior, p1.posterior);
  // Supply never exceeds capacity after rationing.
  for (const auto& r : r1) {
    const double total = std::accumulate(r.acquired.begin(), r.acquired.end(), 0.0);
    double cap = 0.0;
    for (double c : sc.capacity()) cap += c;
    EXPECT_LE(total, cap * (1 + 1e-6));
  }
  std::stringstream js;
  write_cycle_reports_json(r1, sc, js);
  EXPECT_NE(js.str().find("\"seed\""), std::string::npos);
}
