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

// Acceptance run: one PASS/FAIL line per criterion.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "netslice/market.hpp"
#include "netslice/scenario_io.hpp"
#include "oracles.hpp"

using namespace netslice;

namespace {

const std::string kDir = NETSLICE_SCENARIO_DIR;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

AuctionResult three_np_auction(double kappa, std::vector<double> init) {
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  AuctionParams p = sc.auction;
  p.kappa = kappa;
  p.c_init = std::move(init);
  p.certify = false;
  return run_auction(build_market(sc, sc.classes), p, sc.bnb);
}

const MethodResult& method(const Comparison& c, const std::string& name) {
  for (const auto& m : c.methods) {
    if (m.method == name) return m;
  }
  throw std::out_of_range(name);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict clearing_prices() {
  Verdict v;
  const auto res = three_np_auction(1e-4, {0.62, 0.64, 0.58});
  const std::vector<double> ref = {0.6116, 0.6273, 0.5811};
  const auto& last = res.trace.records.back();
  v.require(res.trace.converged, "auction converged");
  for (int k = 0; k < 3; ++k) v.require(std::abs(last.c[k] - ref[k]) <= 0.05, fmt::format("c[{}] within 0.05", k));
  const Scenario sc = load_scenario(kDir + "/three_np.json");
  v.require(last.znorm <= sc.auction.tol, "final |Z| <= tol");
  v.note(fmt::format("c = [{:.4f}, {:.4f}, {:.4f}], |Z| = {:.3g}, {} iterations", last.c[0], last.c[1],
                     last.c[2], last.znorm, res.trace.iterations));
  return v;
}

Verdict init_independence() {
  Verdict v;
  const std::vector<std::vector<double>> inits = {
      {0.62, 0.64, 0.58}, {0.3, 0.3, 0.3}, {1.0, 1.0, 1.0}, {0.5, 0.8, 0.4}, {0.9, 0.5, 0.7}};
  std::vector<std::vector<double>> ends;
  for (const auto& c0 : inits) {
    const auto res = three_np_auction(1e-4, c0);
    v.require(res.trace.converged, "every run converged");
    ends.push_back(res.trace.records.back().c);
  }
  double spread = 0.0;
  for (const auto& e : ends) {
    for (int k = 0; k < 3; ++k) spread = std::max(spread, std::abs(e[k] - ends[0][k]));
  }
  v.require(spread <= 1e-3, "endpoints agree within 1e-3");
  v.note(fmt::format("max componentwise spread {:.2e} over {} starts", spread, inits.size()));
  return v;
}

Verdict lyapunov_descent() {
  Verdict v;
  const double kappa = 1e-4;
  const auto res = three_np_auction(kappa, {0.62, 0.64, 0.58});
  const auto& R = res.trace.records;
  std::size_t steps = 0, down = 0;
  double rel = 0.0;
  for (std::size_t t = 0; t + 1 < R.size(); ++t) {
    ++steps;
    if (R[t + 1].V <= R[t].V) ++down;
    const double z2 = R[t].znorm * R[t].znorm;
    rel += std::abs((R[t + 1].V - R[t].V) / kappa + z2) / z2;
  }
  const double frac = steps ? static_cast<double>(down) / steps : 1.0;
  rel = steps ? rel / steps : 0.0;
  v.require(res.trace.converged, "auction converged");
  v.require(frac >= 0.99, "V nonincreasing on 99% of steps");
  v.require(rel <= 0.10, "mean relative error of dV/kappa vs -|Z|^2 <= 10%");
  v.note(fmt::format("{:.1f}% descending steps, mean relative error {:.4f}", 100.0 * frac, rel));
  return v;
}

Verdict step_size_ordering() {
  Verdict v;
  std::vector<long> its;
  for (double kappa : {1e-4, 1e-5, 1e-6}) {
    const auto res = three_np_auction(kappa, {0.62, 0.64, 0.58});
    v.require(res.trace.converged, fmt::format("kappa {} converged", kappa));
    its.push_back(res.trace.iterations);
  }
  v.require(its[0] < its[1] && its[1] < its[2], "iterations increase as kappa shrinks");
  v.note(fmt::format("iterations {} < {} < {}", its[0], its[1], its[2]));
  return v;
}

Verdict two_provider_structure(const Scenario& sc, const Comparison& cmp) {
  Verdict v;
  const double c2 = sc.nps[1].capacity;
  double worst = 0.0;
  for (const auto& m : cmp.methods) {
    worst = std::max(worst, m.x[0][1]);
    v.require(m.x[0][1] <= 1e-3 * c2, m.method + " gives SP1 nothing on NP2");
    double np1 = 0.0;
    for (const auto& row : m.x) np1 += row[0];
    v.require(m.x[0][0] > 0.5 * np1, m.method + " gives SP1 most of NP1");
  }
  v.note(fmt::format("largest SP1 share of NP2 {:.2e}", worst));
  return v;
}

Verdict revenue_ordering(const Comparison& cmp) {
  Verdict v;
  const auto& a = method(cmp, "auction");
  const auto& s = method(cmp, "spp");
  const auto& o = method(cmp, "ospp");
  const auto& w = method(cmp, "swm");
  v.require(w.total_revenue >= s.total_revenue - w.bound_gap, "SWM >= SPP within gap");
  v.require(w.total_revenue >= a.total_revenue - w.bound_gap, "SWM >= auction within gap");
  v.require(o.total_revenue >= s.total_revenue, "oSPP >= SPP");
  v.note(fmt::format("auction {:.2f}, spp {:.2f}, ospp {:.2f}, swm {:.2f} (gap {:.3g})", a.total_revenue,
                     s.total_revenue, o.total_revenue, w.total_revenue, w.bound_gap));
  return v;
}

Verdict estimate_trend() {
  Verdict v;
  Scenario sc = load_scenario(kDir + "/learning.json");
  const double prior = sc.mcmc.priors.at("c1").params[kTz].mean;
  std::vector<std::vector<double>> used(sc.cycles);
  int at_truth = 0, agree = 0;
  double worst_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    sc.seed = seed;
    MarketState st = initial_state(sc);
    for (int c = 0; c < sc.cycles; ++c) {
      const CycleReport rep = run_cycle(sc, st);
      const double t = rep.estimates[0].t_z;
      used[c].push_back(t);
      if (std::abs(t - 2.0) <= 0.1) {
        ++at_truth;
        const double rel = std::abs(rep.perceived_revenue[0] - rep.actual_revenue[0]) / rep.actual_revenue[0];
        worst_rel = std::max(worst_rel, rel);
        if (rel <= 0.01) ++agree;
      }
    }
  }
  const double m2 = median(used[1]), m3 = median(used.back());
  v.require(std::abs(m2 - 2.0) < std::abs(prior - 2.0), "cycle-2 median moves toward 2");
  v.require(m3 >= 1.5 && m3 <= 2.5, "cycle-3 median in [1.5, 2.5]");
  v.require(at_truth > 0, "some cycle runs within 5% of the true t_z");
  v.require(agree == at_truth, "perceived and actual revenue within 1% near the truth");
  v.note(fmt::format("median t_z by cycle {:.3f} -> {:.3f} -> {:.3f}; {} near-truth cycles, worst gap {:.3f}%",
                     median(used[0]), m2, m3, at_truth, 100.0 * worst_rel));
  return v;
}

std::vector<oracle::User> oracle_users(const SliceModel& sp) {
  std::vector<oracle::User> out;
  for (std::size_t i = 0; i < sp.size(); ++i) out.push_back({sp.classes[i].t_z, sp.classes[i].k, sp.weights[i], sp.beta[i]});
  return out;
}

Verdict oracle_equivalence() {
  Verdict v;
  double worst = 0.0;
  for (const char* name : {"toy_single", "toy_pair", "toy_two_np", "toy_weighted", "toy_band"}) {
    const Scenario sc = load_scenario(kDir + "/" + name + ".json");
    const Market m = build_market(sc, sc.classes);
    for (const auto& sp : m.sps) {
      BnBOptions opt;
      opt.tol = 1e-2;
      const auto res = solve_in_sl(sp, m.capacity, opt);
      const auto ref = oracle::brute_force_split(oracle_users(sp), m.capacity);
      worst = std::max(worst, std::abs(res.value - ref.value));
      v.require(std::abs(res.value - ref.value) <= 2e-2, std::string(name) + " matches brute force");
    }
  }
  const Scenario sc = load_scenario(kDir + "/toy_single.json");
  const SliceModel sp = build_slice(sc.sps[0], sc.classes, 1, false);
  const double w = oracle::tangent_point(0.2, 100.0);
  const double ref = oracle::scan_argmax(
      [&](double z) { return oracle::envelope(0.2, 100.0, w, z) - 0.004 * z - sc.sps[0].lambda * z * z; }, 0.0, 400.0);
  const double x1 = solve_demand(sp, std::vector<double>{0.004}).x[0];
  const double x2 = solve_demand(sp, std::vector<double>{0.02}).x[0];
  v.require(std::abs(x1 - ref) <= 1e-3 && std::abs(x1 - 119.0) <= 0.1, "demand 119.0 at c = 0.004");
  v.require(x2 <= 1e-6, "zero demand at c = 0.02");
  v.note(fmt::format("worst B&B error {:.2e}; demand {:.3f} (scan {:.3f}) and {:.2e}", worst, x1, ref, x2));
  return v;
}

Verdict theorem_band() {
  Verdict v;
  const Scenario sc = load_scenario(kDir + "/toy_band.json");
  const Market m = build_market(sc, sc.classes);
  const SliceModel& sp = m.sps[0];
  const std::vector<double> c = {0.004};
  const double cap = m.capacity[0];
  const auto profit = [&](const std::vector<double>& r, double lambda) {
    double f = 0.0;
    const double x = r[0] + r[1];
    for (int i = 0; i < 2; ++i) f += sp.weights[i] * oracle::sigmoid(sp.classes[i].t_z, sp.classes[i].k, sp.beta[i][0] * r[i]);
    return f - c[0] * x - lambda * x * x;
  };
  const auto all = [](const std::vector<double>&) { return true; };
  const auto star = oracle::grid_maximize(2, {cap, cap}, all, [&](const auto& r) { return profit(r, 0.0); }, 301);
  const auto bar = oracle::grid_maximize(2, {cap, cap}, all, [&](const auto& r) { return profit(r, sp.lambda); }, 301);
  const DemandResult d = solve_demand(sp, c);
  const double xhat = d.x[0], xs = star.x[0] + star.x[1], xb = bar.x[0] + bar.x[1];
  const double realized = sp_profit(sp, c, d.r);
  std::vector<WeightedClass> wc;
  for (std::size_t i = 0; i < sp.size(); ++i) wc.push_back({sp.weights[i], sp.classes[i]});
  const double eps = epsilon_bound(wc, 1);
  const double lo = star.value - eps - sp.lambda * (xs * xs - xhat * xhat);
  const double hi = star.value + sp.lambda * (xhat * xhat - xb * xb);
  v.require(realized >= lo - 1e-9 && realized <= hi + 1e-9, "realized profit inside the band");
  v.note(fmt::format("psi* {:.5f}, realized {:.5f}, band [{:.5f}, {:.5f}], eps {:.4f}", star.value, realized, lo, hi, eps));
  return v;
}

Verdict property_suites() {
  Verdict v;
  // Envelope dominance, tangency and concavity.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> T(0.01, 20.0), Kd(1.0, 300.0);
  bool env_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const ServiceClass cls{"c", T(rng), Kd(rng), 0.0, 0.0};
    const Envelope env = build_envelope(cls);
    double prev = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= 200; ++s) {
      const double z = (env.w * 1.5 + 10.0) * s / 200.0;
      const auto e = envelope_eval(env, cls, z);
      env_ok &= e.value >= qos_satisfaction(z, cls) - 1e-12 && e.derivative <= prev + 1e-12;
      prev = e.derivative;
    }
    env_ok &= std::abs(env.slope - qos_derivative(env.w, cls)) <= 1e-6 * env.slope + 1e-12;
  }
  v.require(env_ok, "envelope properties");

  // Revealed preference on random price pairs.
  const Scenario a6 = load_scenario(kDir + "/three_np.json");
  const SliceModel sp6 = build_slice(a6.sps[0], a6.classes, 3, true);
  std::uniform_real_distribution<double> C(0.4, 0.75);
  int warp = 0, warp_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pa(3), pb(3);
    for (int k = 0; k < 3; ++k) {
      pa[k] = C(rng);
      pb[k] = C(rng);
    }
    const DemandResult da = solve_demand(sp6, pa), db = solve_demand(sp6, pb);
    double sa = 0.0, sb = 0.0, cross = 0.0;
    for (int k = 0; k < 3; ++k) {
      sa += da.x[k];
      sb += db.x[k];
      cross += (pa[k] - pb[k]) * (da.x[k] - db.x[k]);
    }
    if (sa <= 0.0 || sb <= 0.0) continue;
    ++warp;
    if (cross > 1e-6 || demand_objective(sp6, pa, da.r) < demand_objective(sp6, pa, db.r) - 1e-7) ++warp_bad;
  }
  v.require(warp >= 50 && warp_bad == 0, "revealed preference");

  // KKT residuals and the zero-component property on random demands.
  std::uniform_int_distribution<int> N(1, 6), Kn(1, 3);
  std::uniform_real_distribution<double> Tz(0.05, 5.0), Kk(20.0, 150.0), B(0.2, 1.0), Pc(0.001, 1.0), L(1e-5, 1e-3);
  int kkt_bad = 0, zero_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = N(rng), K = Kn(rng);
    std::vector<ServiceClass> cat;
    SPSpec spec{"sp", {}, L(rng)};
    for (int i = 0; i < n; ++i) {
      const double t = Tz(rng), k = Kk(rng);
      cat.push_back({"c" + std::to_string(i), t, k, t, k});
      std::vector<double> beta(K);
      for (auto& b : beta) b = B(rng);
      spec.users.push_back({"u" + std::to_string(i), cat.back().id, beta, 1.0});
    }
    const SliceModel sp = build_slice(spec, cat, K, true);
    std::vector<double> c(K);
    for (auto& x : c) x = Pc(rng);
    const DemandResult d = solve_demand(sp, c);
    if (!d.converged || d.kkt_residual > DemandOptions{}.tol) ++kkt_bad;
    for (int k = 0; k < K; ++k) {
      double mu = 0.0;
      for (std::size_t i = 0; i < sp.size(); ++i) {
        mu = std::max(mu, sp.weights[i] * envelope_eval(sp.envelopes[i], sp.classes[i], d.z[i]).derivative * sp.beta[i][k]);
      }
      const double slack = 1e-5 * (1.0 + c[k]);
      if (d.x[k] > 1e-6 ? std::abs(mu - 2.0 * sp.lambda * d.x[k] - c[k]) > slack : mu > c[k] + slack) ++zero_bad;
    }
  }
  v.require(kkt_bad == 0, "KKT residuals within tolerance");
  v.require(zero_bad == 0, "zero-component property");

  // Sampler reproduces a truncated normal prior when there is no data.
  const ServiceClass truth{"c", 2.0, 120.0, 2.0, 120.0};
  PriorSpec prior = fixed_prior(truth);
  prior.params[kTz] = {1.0, 0.8, true};
  MCMCOptions mo;
  mo.n_samples = 2200;
  mo.burn_in = 200;
  mo.thin = 25;
  mo.proposal_scale = 1.0;
  mo.seed = 42;
  const Posterior post = metropolis_sample(prior, {}, mo);
  std::vector<double> xs;
  for (const auto& th : post.samples) xs.push_back(th[kTz]);
  std::sort(xs.begin(), xs.end());
  const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  const double z0 = phi(-1.0 / 0.8), n = static_cast<double>(xs.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = (phi((xs[i] - 1.0) / 0.8) - z0) / (1.0 - z0);
    ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  v.require(ks < 1.95 / std::sqrt(n), "prior recovery KS test");

  // Seed determinism across the pipeline.
  const Posterior again = metropolis_sample(prior, {}, mo);
  Scenario c6 = load_scenario(kDir + "/learning.json");
  c6.cycles = 1;
  MarketState s1 = initial_state(c6), s2 = initial_state(c6);
  const CycleReport r1 = run_cycle(c6, s1), r2 = run_cycle(c6, s2);
  const Market m6 = build_market(a6, a6.classes);
  const std::vector<double> cp = {0.6, 0.6, 0.6};
  v.require(again.samples == post.samples && r1.feedback == r2.feedback && r1.acquired == r2.acquired &&
                excess_demand(m6, cp).Z == excess_demand_serial(m6, cp).Z,
            "seed determinism");
  v.note(fmt::format("{} WARP pairs, KS {:.4f}", warp, ks));
  return v;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const Scenario b = load_scenario(kDir + "/two_provider.json");
  const Comparison cmp = compare_methods(b);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"clearing prices on the three-NP fixture", clearing_prices},
      {"initialization independence", init_independence},
      {"Lyapunov descent", lyapunov_descent},
      {"step-size ordering", step_size_ordering},
      {"two-provider allocation structure", [&] { return two_provider_structure(b, cmp); }},
      {"revenue ordering", [&] { return revenue_ordering(cmp); }},
      {"learning trend over cycles", estimate_trend},
      {"oracle equivalence", oracle_equivalence},
      {"profit band", theorem_band},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.ok;
    fmt::print("criterion {:>2}: {} {} ({})\n", i + 1, v.ok ? "PASS" : "FAIL", criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} of {} criteria passed in {:.1f} s\n", criteria.size() - failed, criteria.size(), secs);
  return failed ? 1 : 0;
}
