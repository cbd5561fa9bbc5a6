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

#include "netslice/inference.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace netslice {

namespace {

const double kLogFloor = std::log(1e-300);

// log(1 - exp(x)) for x <= 0.
double log1mexp(double x) {
  if (x >= 0.0) return -std::numeric_limits<double>::infinity();
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

double log_prior(const PriorSpec& prior, const Theta& theta) {
  double lp = 0.0;
  for (int j = 0; j < 4; ++j) {
    const auto& pp = prior.params[j];
    if (!pp.free) continue;
    const double d = (theta[j] - pp.mean) / pp.std;
    lp -= 0.5 * d * d;
  }
  return lp;
}

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  if (var <= 0.0) return static_cast<double>(n);
  double tau = 1.0;
  for (std::size_t lag = 1; lag < n / 2; ++lag) {
    double acf = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acf += (x[i] - mean) * (x[i + lag] - mean);
    acf /= var;
    if (acf < 0.05) break;
    tau += 2.0 * acf;
  }
  return static_cast<double>(n) / tau;
}

}  // namespace

Theta theta_of(const ServiceClass& cls) { return {cls.t_p, cls.b, cls.t_z, cls.k}; }

ServiceClass with_theta(ServiceClass cls, const Theta& theta) {
  cls.t_p = theta[kTp];
  cls.b = theta[kB];
  cls.t_z = theta[kTz];
  cls.k = theta[kK];
  return cls;
}

PriorSpec fixed_prior(const ServiceClass& cls) {
  PriorSpec prior;
  const Theta t = theta_of(cls);
  for (int j = 0; j < 4; ++j) prior.params[j] = {t[j], 1.0, false};
  return prior;
}

double satisfaction_probability(const Theta& theta, double z, double p) {
  double lp = log_logistic(theta[kTz] * (z - theta[kK]));
  if (p > 0.0) lp += log_logistic(-theta[kTp] * (p - theta[kB]));
  return std::exp(lp);
}

double log_likelihood(const Theta& theta, std::span<const FeedbackRecord> data) {
  double ll = 0.0;
  for (const auto& rec : data) {
    const double a = theta[kTz] * (rec.z - theta[kK]);
    double log_sat = log_logistic(a);
    double log_unsat;
    if (rec.p > 0.0) {
      log_sat += log_logistic(-theta[kTp] * (rec.p - theta[kB]));
      log_unsat = log1mexp(log_sat);
    } else {
      log_unsat = log_logistic(-a);
    }
    ll += std::max(rec.satisfied ? log_sat : log_unsat, kLogFloor);
  }
  return ll;
}

Posterior metropolis_sample(const PriorSpec& prior, std::span<const FeedbackRecord> data,
                            const MCMCOptions& options) {
  const int burn = options.burn_in >= 0 ? options.burn_in : options.n_samples / 5;
  if (options.n_samples <= burn) throw std::invalid_argument("n_samples must exceed burn_in");
  if (!(options.proposal_scale > 0.0) || options.thin < 1) {
    throw std::invalid_argument("proposal_scale must be > 0 and thin >= 1");
  }
  std::vector<int> free;
  for (int j = 0; j < 4; ++j) {
    if (prior.params[j].free) {
      if (!(prior.params[j].std > 0.0)) throw std::invalid_argument("prior std must be > 0");
      free.push_back(j);
    }
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Theta theta;
  for (int j = 0; j < 4; ++j) theta[j] = std::max(prior.params[j].mean, 0.0);
  double logpost = log_likelihood(theta, data) + log_prior(prior, theta);

  Posterior post;
  post.samples.reserve(options.n_samples - burn);
  long accepted = 0;
  long steps = 0;
  for (int s = 0; s < options.n_samples; ++s) {
    for (int t = 0; t < options.thin && !free.empty(); ++t) {
      Theta prop = theta;
      bool inside = true;
      for (int j : free) {
        prop[j] += options.proposal_scale * prior.params[j].std * normal(rng);
        inside = inside && prop[j] >= 0.0;
      }
      const double u = unif(rng);
      ++steps;
      if (!inside) continue;
      const double cand = log_likelihood(prop, data) + log_prior(prior, prop);
      if (std::log(u) < cand - logpost) {
        theta = prop;
        logpost = cand;
        ++accepted;
      }
    }
    if (s >= burn) post.samples.push_back(theta);
  }
  post.acceptance_rate = steps > 0 ? static_cast<double>(accepted) / static_cast<double>(steps) : 1.0;
  post.tuning_warning = !free.empty() && post.acceptance_rate < 0.01;

  const double n = static_cast<double>(post.samples.size());
  for (int j = 0; j < 4; ++j) {
    double m = 0.0;
    for (const auto& th : post.samples) m += th[j];
    m /= n;
    double v = 0.0;
    for (const auto& th : post.samples) v += (th[j] - m) * (th[j] - m);
    post.mean[j] = m;
    post.std[j] = n > 1 ? std::sqrt(v / (n - 1)) : 0.0;
  }
  if (!free.empty()) {
    std::vector<double> trace;
    trace.reserve(post.samples.size());
    for (const auto& th : post.samples) trace.push_back(th[free.front()]);
    post.ess_hint = effective_sample_size(trace);
  } else {
    post.ess_hint = n;
  }
  return post;
}

PriorSpec update_prior(const Posterior& posterior, const PriorSpec& previous, double std_floor) {
  if (posterior.samples.empty()) throw std::invalid_argument("empty posterior");
  PriorSpec next = previous;
  for (int j = 0; j < 4; ++j) {
    if (!next.params[j].free) continue;
    next.params[j].mean = posterior.mean[j];
    next.params[j].std = std::max(posterior.std[j], std_floor);
  }
  return next;
}

void write_posterior_csv(const Posterior& posterior, std::ostream& out) {
  out << "sample_index,t_p,b,t_z,k\n";
  for (std::size_t i = 0; i < posterior.samples.size(); ++i) {
    const auto& th = posterior.samples[i];
    fmt::print(out, "{},{},{},{},{}\n", i, th[0], th[1], th[2], th[3]);
  }
  const auto& m = posterior.mean;
  fmt::print(out, "mean,{},{},{},{}\n", m[0], m[1], m[2], m[3]);
}

void write_feedback_csv(std::span<const FeedbackRecord> records, std::ostream& out) {
  out << "user,cycle,z,p,satisfied\n";
  for (const auto& r : records) {
    fmt::print(out, "{},{},{},{},{}\n", r.user_id, r.cycle, r.z, r.p, r.satisfied ? 1 : 0);
  }
}

std::vector<FeedbackRecord> read_feedback_csv(std::istream& in) {
  std::vector<FeedbackRecord> out;
  std::string line;
  int lineno = 0;
  const auto bad = [&](const std::string& why) {
    throw std::runtime_error("feedback line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "user,cycle,z,p,satisfied") bad("expected header user,cycle,z,p,satisfied");
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) bad("expected 5 fields");
    FeedbackRecord r;
    r.user_id = cells[0];
    try {
      std::size_t used = 0;
      r.cycle = std::stoi(cells[1], &used);
      if (used != cells[1].size()) bad("malformed cycle");
      r.z = std::stod(cells[2], &used);
      if (used != cells[2].size()) bad("malformed z");
      r.p = std::stod(cells[3], &used);
      if (used != cells[3].size()) bad("malformed p");
    } catch (const std::logic_error&) {
      bad("malformed number");
    }
    if (cells[4] != "0" && cells[4] != "1") bad("satisfied must be 0 or 1");
    r.satisfied = cells[4] == "1";
    if (!(r.z >= 0.0) || !(r.p >= 0.0)) bad("z and p must be nonnegative");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace netslice
