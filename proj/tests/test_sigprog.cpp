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
#include <random>
#include <vector>

#include "netslice/scenario_io.hpp"
#include "netslice/sigprog.hpp"
#include "oracles.hpp"

using namespace netslice;

namespace {

const std::string kDir = NETSLICE_SCENARIO_DIR;

std::vector<oracle::User> oracle_users(const SliceModel& sp) {
  std::vector<oracle::User> out;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    out.push_back({sp.classes[i].t_z, sp.classes[i].k, sp.weights[i], sp.beta[i]});
  }
  return out;
}

SliceModel slice_of(const std::vector<ServiceClass>& cat, const std::vector<UserSpec>& users, int K,
                    double lambda = 1e-4) {
  return build_slice({"sp", users, lambda}, cat, K, false);
}

}  // namespace

TEST(BnB, MatchesBruteForceOnBundledToys) {
  for (const char* name : {"toy_single", "toy_pair", "toy_two_np", "toy_weighted", "toy_band"}) {
    const Scenario sc = load_scenario(kDir + "/" + name + ".json");
    const Market m = build_market(sc, sc.classes);
    for (const auto& sp : m.sps) {
      ASSERT_LE(sp.size(), 3u);
      BnBOptions opt;
      opt.tol = 1e-2;
      const SigProgResult res = solve_in_sl(sp, m.capacity, opt);
      const auto ref = oracle::brute_force_split(oracle_users(sp), m.capacity);
      EXPECT_TRUE(res.optimal) << name;
      EXPECT_NEAR(res.value, ref.value, 2e-2) << name;
      EXPECT_GE(res.upper_bound, ref.value - 1e-9) << name;
      for (int k = 0; k < sp.num_nps; ++k) EXPECT_LE(res.y[k], m.capacity[k] + 1e-6);
    }
  }
}

TEST(BnBProperty, RandomSmallInstancesMatchBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> N(1, 3), Kn(1, 2);
  std::uniform_real_distribution<double> T(0.05, 3.0), Kd(20.0, 120.0), B(0.3, 1.0), Cap(10.0, 200.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = N(rng), K = Kn(rng);
    std::vector<ServiceClass> cat;
    std::vector<UserSpec> users;
    for (int i = 0; i < n; ++i) {
      cat.push_back({"c" + std::to_string(i), T(rng), Kd(rng), 0.0, 0.0});
      std::vector<double> beta(K);
      for (auto& b : beta) b = B(rng);
      users.push_back({"u" + std::to_string(i), cat.back().id, beta, 1.0});
    }
    std::vector<double> cap(K);
    for (auto& c : cap) c = Cap(rng);
    const SliceModel sp = slice_of(cat, users, K);
    BnBOptions opt;
    opt.tol = 1e-2;
    const SigProgResult res = solve_in_sl(sp, cap, opt);
    const auto ref = oracle::brute_force_split(oracle_users(sp), cap, n == 3 && K == 2 ? 31 : 61);
    EXPECT_NEAR(res.value, ref.value, 2e-2) << "trial " << trial;
    EXPECT_GE(res.upper_bound, ref.value - 1e-9) << "trial " << trial;
  }
}

TEST(BnBProperty, AnytimeBoundsAreSound) {
  std::vector<ServiceClass> cat = {{"s", 2.0, 100.0, 0.0, 0.0}};
  std::vector<UserSpec> users;
  for (int i = 0; i < 10; ++i) users.push_back({"u" + std::to_string(i), "s", {1.0}, 1.0});
  const SliceModel sp = slice_of(cat, users, 1);
  BnBOptions opt;
  opt.record_trace = true;
  opt.tol = 1e-6;
  const SigProgResult res = solve_in_sl(sp, std::vector<double>{560.0}, opt);
  ASSERT_FALSE(res.trace.empty());
  double last_gap = std::numeric_limits<double>::infinity();
  for (const auto& p : res.trace) {
    EXPECT_LE(p.incumbent, p.upper_bound + 1e-12);
    const double gap = p.upper_bound - p.incumbent;
    EXPECT_LE(gap, last_gap + 1e-12);
    last_gap = gap;
  }
  // 560 units serve five users past their prerequisite and nobody else.
  EXPECT_NEAR(res.value, 5.0 * oracle::sigmoid(2.0, 100.0, 112.0) + 5.0 * oracle::sigmoid(2.0, 100.0, 0.0), 1e-3);
}

TEST(BnB, SerialAndParallelAgree) {
  const Scenario sc = load_scenario(kDir + "/two_provider.json");
  const Market m = build_market(sc, sc.classes);
  BnBOptions par, ser;
  ser.parallel = false;
  const std::vector<double> x = {1300.0, 10.0};
  const SigProgResult a = solve_in_sl(m.sps[0], x, par);
  const SigProgResult b = solve_in_sl(m.sps[0], x, ser);
  EXPECT_NEAR(a.value, b.value, std::max(a.tol, b.tol));
  EXPECT_TRUE(a.optimal && b.optimal);
}

TEST(BnB, HomogeneousUsersSplitEvenly) {
  std::vector<ServiceClass> cat = {{"a", 0.2, 100.0, 0.2, 100.0}};
  std::vector<UserSpec> users;
  for (int i = 0; i < 5; ++i) users.push_back({"u" + std::to_string(i), "a", {0.8, 0.8}, 1.0});
  const SliceModel sp = slice_of(cat, users, 2);
  BnBOptions opt;
  opt.tol = 1e-6;
  const SigProgResult res = solve_in_sl(sp, std::vector<double>{400.0, 350.0}, opt);
  const auto [lo, hi] = std::minmax_element(res.z.begin(), res.z.end());
  EXPECT_NEAR(*lo, 120.0, 0.5);
  EXPECT_LE(*hi - *lo, 0.5);
}

TEST(BnB, BetterConnectedUsersNeedFewerResources) {
  const std::vector<double> betas = {0.99, 0.96, 0.87, 0.85, 0.82, 0.81, 0.80, 0.80, 0.70, 0.70};
  std::vector<ServiceClass> cat = {{"a", 0.2, 100.0, 0.2, 100.0}};
  std::vector<UserSpec> users;
  for (std::size_t i = 0; i < betas.size(); ++i) users.push_back({"u" + std::to_string(i), "a", {betas[i]}, 1.0});
  const SliceModel sp = slice_of(cat, users, 1);
  BnBOptions opt;
  opt.tol = 1e-4;
  const SigProgResult res = solve_in_sl(sp, std::vector<double>{1300.0}, opt);
  std::vector<double> r;
  for (const auto& row : res.r) r.push_back(row[0]);
  EXPECT_LE(oracle::spearman(betas, r), 0.0);
  for (std::size_t i = 0; i + 1 < betas.size(); ++i) {
    if (r[i] > 1e-6 && r[i + 1] > 1e-6 && betas[i] > betas[i + 1]) EXPECT_LE(r[i], r[i + 1] + 1e-3);
  }
}

TEST(ExactDemand, SingleUserMatchesScan) {
  std::vector<ServiceClass> cat = {{"a", 0.2, 100.0, 0.0, 0.0}};
  const SliceModel sp = slice_of(cat, {{"u", "a", {1.0}, 1.0}}, 1, 1e-6);
  for (double c : {0.004, 0.006, 0.02}) {
    const auto f = [&](double z) { return oracle::sigmoid(0.2, 100.0, z) - c * z - 1e-6 * z * z; };
    const double z = oracle::scan_argmax(f, 0.0, 400.0);
    BnBOptions opt;
    opt.tol = 1e-8;
    const SigProgResult res = solve_exact_demand(sp, std::vector<double>{c}, opt);
    EXPECT_NEAR(res.value, f(z), 1e-6);
    EXPECT_GE(res.upper_bound, f(z) - 1e-9);
  }
}

TEST(Swm, GivesNoPoorlyConnectedCapacity) {
  const Scenario sc = load_scenario(kDir + "/two_provider.json");
  const Market m = build_market(sc, sc.classes);
  const SigProgResult res = solve_swm(m.sps, m.capacity);
  EXPECT_TRUE(res.optimal);
  double sp1_np2 = 0.0, sp1_np1 = 0.0;
  for (std::size_t i = 0; i < sc.sps[0].users.size(); ++i) {
    sp1_np1 += res.r[i][0];
    sp1_np2 += res.r[i][1];
  }
  EXPECT_LE(sp1_np2, 1e-3 * m.capacity[1]);
  EXPECT_GT(sp1_np1, 0.5 * m.capacity[0]);
  for (int k = 0; k < 2; ++k) EXPECT_LE(res.y[k], m.capacity[k] + 1e-6);
}

TEST(BnB, ZeroCapacityAllocatesNothing) {
  std::vector<ServiceClass> cat = {{"a", 0.2, 100.0, 0.0, 0.0}};
  const SliceModel sp = slice_of(cat, {{"u", "a", {1.0, 1.0}, 1.0}}, 2);
  const SigProgResult res = solve_in_sl(sp, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(res.r[0][0], 0.0);
  EXPECT_EQ(res.r[0][1], 0.0);
  EXPECT_NEAR(res.value, oracle::sigmoid(0.2, 100.0, 0.0), 1e-12);
}
