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
#include <random>
#include <sstream>
#include <vector>

#include "netslice/inference.hpp"

using namespace netslice;

namespace {

const ServiceClass kTruth{"c", 2.0, 120.0, 2.0, 120.0};

PriorSpec tz_prior(double mean, double std) {
  PriorSpec p = fixed_prior(kTruth);
  p.params[kTz] = {mean, std, true};
  return p;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Synthetic feedback from the true class at spread-out operating points.
std::vector<FeedbackRecord> synthetic(int n, std::uint64_t seed, bool priced, double spread = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> Z(120.0 - spread, 120.0 + spread), U(0.0, 1.0);
  std::vector<FeedbackRecord> out;
  for (int i = 0; i < n; ++i) {
    const double z = Z(rng);
    const double p = priced ? 117.0 : 0.0;
    double prob = 1.0 / (1.0 + std::exp(-2.0 * (z - 120.0)));
    if (priced) prob /= 1.0 + std::exp(2.0 * (p - 120.0));
    out.push_back({"u" + std::to_string(i), 1, z, p, U(rng) < prob});
  }
  return out;
}

}  // namespace

TEST(Likelihood, MatchesDirectFormula) {
  const Theta th = theta_of(kTruth);
  const auto data = synthetic(40, 3, true);
  double ll = 0.0;
  for (const auto& r : data) {
    const double prob = 1.0 / (1.0 + std::exp(-2.0 * (r.z - 120.0))) / (1.0 + std::exp(2.0 * (r.p - 120.0)));
    EXPECT_NEAR(satisfaction_probability(th, r.z, r.p), prob, 1e-14);
    ll += std::log(r.satisfied ? prob : 1.0 - prob);
  }
  EXPECT_NEAR(log_likelihood(th, data), ll, 1e-9 * std::abs(ll));
  // Without a price only the QoS factor remains.
  EXPECT_NEAR(satisfaction_probability(th, 121.0, 0.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
}

TEST(Likelihood, StaysFiniteInTheTails) {
  Theta th = theta_of(kTruth);
  th[kTz] = 50.0;
  const std::vector<FeedbackRecord> data = {{"a", 1, 0.0, 500.0, true}, {"b", 1, 1e4, 0.0, false}};
  EXPECT_TRUE(std::isfinite(log_likelihood(th, data)));
}

TEST(Mcmc, RecoversPriorWithoutData) {
  MCMCOptions opt;
  opt.n_samples = 2200;
  opt.burn_in = 200;
  opt.thin = 25;
  opt.proposal_scale = 1.0;
  opt.seed = 42;
  const double mu = 1.0, sd = 0.8;
  const Posterior post = metropolis_sample(tz_prior(mu, sd), {}, opt);
  std::vector<double> x;
  for (const auto& th : post.samples) x.push_back(th[kTz]);
  std::sort(x.begin(), x.end());
  const double z0 = normal_cdf(-mu / sd);
  double d = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = (normal_cdf((x[i] - mu) / sd) - z0) / (1.0 - z0);
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  // Kolmogorov-Smirnov critical value at the 0.1% level.
  EXPECT_LT(d, 1.95 / std::sqrt(n));
  for (const auto& th : post.samples) {
    EXPECT_EQ(th[kK], 120.0);
    EXPECT_GE(th[kTz], 0.0);
  }
}

TEST(Mcmc, ConcentratesNearTruth) {
  MCMCOptions opt;
  opt.n_samples = 6000;
  opt.proposal_scale = 0.5;
  opt.seed = 8;
  const Posterior post = metropolis_sample(tz_prior(0.02, 2.0), synthetic(400, 9, false, 2.0), opt);
  EXPECT_NEAR(post.mean[kTz], 2.0, 0.6);
  EXPECT_LT(post.std[kTz], 1.0);
  EXPECT_FALSE(post.tuning_warning);
}

TEST(Mcmc, SecondUpdateIsTighter) {
  MCMCOptions opt;
  opt.n_samples = 5000;
  opt.proposal_scale = 0.5;
  opt.seed = 1;
  const PriorSpec p0 = tz_prior(0.02, 2.0);
  const Posterior a = metropolis_sample(p0, synthetic(10, 21, true), opt);
  const PriorSpec p1 = update_prior(a, p0);
  opt.seed = 2;
  const Posterior b = metropolis_sample(p1, synthetic(10, 22, true), opt);
  const PriorSpec p2 = update_prior(b, p1);
  EXPECT_LT(p1.params[kTz].std, p0.params[kTz].std);
  EXPECT_LT(p2.params[kTz].std, p1.params[kTz].std);
  EXPECT_EQ(p2.params[kK], p0.params[kK]);
}

TEST(Mcmc, SeedDeterminism) {
  MCMCOptions opt;
  opt.n_samples = 800;
  opt.seed = 5;
  const auto data = synthetic(20, 4, true);
  const Posterior a = metropolis_sample(tz_prior(1.0, 1.0), data, opt);
  const Posterior b = metropolis_sample(tz_prior(1.0, 1.0), data, opt);
  EXPECT_EQ(a.samples, b.samples);
  opt.seed = 6;
  const Posterior c = metropolis_sample(tz_prior(1.0, 1.0), data, opt);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Mcmc, FlagsPoorTuning) {
  MCMCOptions opt;
  opt.n_samples = 2000;
  opt.proposal_scale = 500.0;
  opt.seed = 3;
  const Posterior post = metropolis_sample(tz_prior(2.0, 1.0), synthetic(400, 9, false), opt);
  EXPECT_LT(post.acceptance_rate, 0.01);
  EXPECT_TRUE(post.tuning_warning);
}

TEST(Mcmc, RejectsBadOptions) {
  MCMCOptions opt;
  opt.n_samples = 10;
  opt.burn_in = 10;
  EXPECT_THROW(metropolis_sample(tz_prior(1.0, 1.0), {}, opt), std::invalid_argument);
  opt.burn_in = 0;
  EXPECT_THROW(metropolis_sample(tz_prior(1.0, 0.0), {}, opt), std::invalid_argument);
}

TEST(Feedback, CsvRoundTrip) {
  const auto data = synthetic(25, 12, true);
  std::stringstream buf;
  write_feedback_csv(data, buf);
  EXPECT_EQ(read_feedback_csv(buf), data);
  std::stringstream bad("user,cycle,z,p,satisfied\nu1,1,abc,0,1\n");
  try {
    read_feedback_csv(bad);
    FAIL() << "malformed record accepted";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Posterior, CsvEndsWithMeanRow) {
  MCMCOptions opt;
  opt.n_samples = 50;
  opt.burn_in = 0;
  const Posterior post = metropolis_sample(tz_prior(1.0, 1.0), {}, opt);
  std::stringstream buf;
  write_posterior_csv(post, buf);
  std::string line, last;
  std::getline(buf, line);
  EXPECT_EQ(line, "sample_index,t_p,b,t_z,k");
  int rows = 0;
  while (std::getline(buf, line)) {
    last = line;
    ++rows;
  }
  EXPECT_EQ(rows, 51);
  EXPECT_EQ(last.rfind("mean,", 0), 0u);
}
