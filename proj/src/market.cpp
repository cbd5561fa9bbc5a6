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

#include "netslice/market.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include "json.hpp"
#include <ostream>
#include <stdexcept>

namespace netslice {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t derive_seed(std::uint64_t seed, int cycle, int stream, int index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cycle), static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

const ServiceClass& lookup(std::span<const ServiceClass> catalog, const std::string& id) {
  for (const auto& c : catalog) {
    if (c.id == id) return c;
  }
  throw std::invalid_argument("unknown class '" + id + "'");
}

std::vector<std::vector<double>> demanded(const EquilibriumCertificate& cert) {
  std::vector<std::vector<double>> x;
  for (const auto& d : cert.demands) x.push_back(d.x);
  return x;
}

// Builds a method result from per-SP user allocations (user-major r).
MethodResult assemble(const std::string& name, const Scenario& sc,
                      std::span<const ServiceClass> pricing_catalog,
                      const std::vector<std::vector<std::vector<double>>>& r) {
  const int K = sc.num_nps();
  MethodResult res;
  res.method = name;
  res.x.assign(sc.sps.size(), std::vector<double>(K, 0.0));
  for (std::size_t m = 0; m < sc.sps.size(); ++m) {
    const auto& sp = sc.sps[m];
    for (std::size_t i = 0; i < sp.users.size(); ++i) {
      const auto& u = sp.users[i];
      UserAllocation ua;
      ua.sp = sp.id;
      ua.user = u.id;
      ua.class_id = u.class_id;
      ua.r = r[m][i];
      for (int k = 0; k < K; ++k) {
        ua.z += u.beta[k] * ua.r[k];
        res.x[m][k] += ua.r[k];
      }
      ua.p = sc.pricing_enabled ? optimal_price(lookup(pricing_catalog, u.class_id)) : 0.0;
      res.users.push_back(std::move(ua));
    }
  }
  return res;
}

std::vector<std::vector<std::vector<double>>> solve_slices(const Market& market,
                                                          const std::vector<std::vector<double>>& supply,
                                                          const BnBOptions& bnb, double& gap) {
  const int m = static_cast<int>(market.sps.size());
  std::vector<SigProgResult> res(m);
  BnBOptions inner = bnb;
  inner.parallel = false;
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < m; ++j) res[j] = solve_in_sl(market.sps[j], supply[j], inner);
  gap = 0.0;
  std::vector<std::vector<std::vector<double>>> r(m);
  for (int j = 0; j < m; ++j) {
    r[j] = res[j].r;
    gap += res[j].gap;
  }
  return r;
}

std::vector<double> column_total(const std::vector<std::vector<double>>& x, int K) {
  std::vector<double> t(K, 0.0);
  for (const auto& row : x) {
    for (int k = 0; k < K; ++k) t[k] += row[k];
  }
  return t;
}

json theta_json(const Theta& t) {
  json j;
  for (int p = 0; p < 4; ++p) j[kParamNames[p]] = t[p];
  return j;
}

json prior_json(const PriorSpec& prior) {
  json j = json::object();
  for (int p = 0; p < 4; ++p) {
    const auto& pp = prior.params[p];
    j[kParamNames[p]] = {{"mean", pp.mean}, {"std", pp.std}, {"free", pp.free}};
  }
  return j;
}

json method_json(const MethodResult& m) {
  return {{"method", m.method},       {"x", m.x},
          {"revenue", m.revenue},     {"total_revenue", m.total_revenue},
          {"bound_gap", m.bound_gap}, {"oversell", m.oversell}};
}

}  // namespace

MarketState initial_state(const Scenario& sc) {
  MarketState st;
  st.estimates = sc.classes;
  st.priors = sc.mcmc.priors;
  for (auto& cls : st.estimates) {
    auto it = st.priors.find(cls.id);
    if (it == st.priors.end()) continue;
    Theta t = theta_of(cls);
    for (int j = 0; j < 4; ++j) {
      if (it->second.params[j].free) t[j] = std::max(it->second.params[j].mean, 0.0);
    }
    cls = with_theta(cls, t);
  }
  return st;
}

std::vector<double> overbook(std::span<const double> x, std::span<const double> alpha) {
  if (x.size() != alpha.size()) throw std::invalid_argument("overbook: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] >= 0.0) || !(alpha[k] >= 0.0)) {
      throw std::invalid_argument("overbook: x and alpha must be nonnegative");
    }
    out[k] = x[k] * (1.0 + alpha[k] / 100.0);
  }
  return out;
}

std::vector<std::vector<double>> ration(const std::vector<std::vector<double>>& x,
                                        std::span<const double> capacity) {
  const int K = static_cast<int>(capacity.size());
  const auto total = column_total(x, K);
  auto out = x;
  for (int k = 0; k < K; ++k) {
    if (total[k] <= capacity[k]) continue;
    const double f = capacity[k] / total[k];
    for (auto& row : out) row[k] *= f;
  }
  return out;
}

std::vector<FeedbackRecord> sample_feedback(std::span<const UserAllocation> allocation,
                                            std::span<const ServiceClass> true_classes, int cycle,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<FeedbackRecord> out;
  out.reserve(allocation.size());
  for (const auto& ua : allocation) {
    const double prob = satisfaction_probability(theta_of(lookup(true_classes, ua.class_id)), ua.z, ua.p);
    out.push_back({ua.user, cycle, ua.z, ua.p, unif(rng) < prob});
  }
  return out;
}

void price_allocation(MethodResult& result, const Scenario& sc, std::span<const ServiceClass> catalog) {
  std::vector<std::string> ids;
  for (const auto& sp : sc.sps) ids.push_back(sp.id);
  result.revenue.assign(sc.sps.size(), 0.0);
  result.total_revenue = 0.0;
  for (auto& ua : result.users) {
    const ServiceClass& cls = lookup(catalog, ua.class_id);
    const Charge ch{ua.z, ua.p};
    ua.expected_revenue = expected_revenue(std::span(&ch, 1), std::span(&cls, 1));
    const auto m = std::find(ids.begin(), ids.end(), ua.sp) - ids.begin();
    result.revenue[m] += ua.expected_revenue;
    result.total_revenue += ua.expected_revenue;
  }
}

CycleReport run_cycle(const Scenario& sc, MarketState& state) {
  const int K = sc.num_nps();
  const auto capacity = sc.capacity();
  CycleReport rep;
  rep.cycle = ++state.cycle;
  rep.estimates = state.estimates;

  // Users are fixed by the scenario. Prices form on the estimates.
  const Market market = build_market(sc, state.estimates);
  AuctionResult ar = run_auction(market, sc.auction, sc.bnb);
  rep.trace = std::move(ar.trace);
  rep.certificate = std::move(ar.certificate);
  const auto xhat = ration(demanded(rep.certificate), capacity);

  MethodResult auction_method;
  {
    std::vector<std::vector<std::vector<double>>> r(sc.sps.size());
    const auto raw = column_total(demanded(rep.certificate), K);
    for (std::size_t m = 0; m < sc.sps.size(); ++m) {
      r[m] = rep.certificate.demands[m].r;
      for (auto& row : r[m]) {
        for (int k = 0; k < K; ++k) {
          if (raw[k] > capacity[k]) row[k] *= capacity[k] / raw[k];
        }
      }
    }
    auction_method = assemble("auction", sc, state.estimates, r);
  }

  // Intra-slice allocation, overbooked when configured.
  const bool ov = !sc.overbook_alpha.empty() &&
                  std::any_of(sc.overbook_alpha.begin(), sc.overbook_alpha.end(), [](double a) { return a > 0.0; });
  std::vector<std::vector<double>> supply = xhat;
  if (ov) {
    for (auto& row : supply) row = overbook(row, sc.overbook_alpha);
  }
  double gap = 0.0;
  const auto r = solve_slices(market, supply, sc.bnb, gap);
  MethodResult slice = assemble(ov ? "ospp" : "spp", sc, state.estimates, r);
  slice.bound_gap = gap;
  if (ov) {
    const auto used = column_total(slice.x, K);
    const auto bought = column_total(xhat, K);
    slice.oversell.resize(K);
    for (int k = 0; k < K; ++k) slice.oversell[k] = std::max(0.0, used[k] - bought[k]);
  }

  price_allocation(auction_method, sc, sc.classes);
  MethodResult perceived = slice;
  price_allocation(perceived, sc, state.estimates);
  price_allocation(slice, sc, sc.classes);
  rep.perceived_revenue = perceived.revenue;
  rep.actual_revenue = slice.revenue;
  for (const auto& row : xhat) {
    double s = 0.0;
    for (double v : row) s += v;
    rep.acquired.push_back(s);
  }

  // Feedback under the true parameters.
  std::mt19937_64 rng(derive_seed(sc.seed, rep.cycle, 1));
  rep.feedback = sample_feedback(slice.users, sc.classes, rep.cycle, rng);
  rep.realized_revenue.assign(sc.sps.size(), 0.0);
  for (std::size_t j = 0; j < rep.feedback.size(); ++j) {
    if (!rep.feedback[j].satisfied) continue;
    const auto& sp_id = slice.users[j].sp;
    for (std::size_t m = 0; m < sc.sps.size(); ++m) {
      if (sc.sps[m].id == sp_id) rep.realized_revenue[m] += rep.feedback[j].p;
    }
  }

  // Posterior per learned class; it becomes the next prior.
  int index = 0;
  for (auto& [cls_id, prior] : state.priors) {
    std::vector<FeedbackRecord> data;
    for (std::size_t j = 0; j < rep.feedback.size(); ++j) {
      if (slice.users[j].class_id == cls_id) data.push_back(rep.feedback[j]);
    }
    MCMCOptions mo;
    mo.n_samples = sc.mcmc.n_samples;
    mo.burn_in = sc.mcmc.burn_in;
    mo.proposal_scale = sc.mcmc.proposal_scale;
    mo.thin = sc.mcmc.thin;
    mo.seed = derive_seed(sc.seed, rep.cycle, 2, index++);
    Posterior post = metropolis_sample(prior, data, mo);
    ClassPosterior cp;
    cp.class_id = cls_id;
    cp.records = data.size();
    cp.mean = post.mean;
    cp.std = post.std;
    cp.acceptance_rate = post.acceptance_rate;
    cp.ess_hint = post.ess_hint;
    cp.tuning_warning = post.tuning_warning;
    cp.prior = prior;
    prior = update_prior(post, prior);
    cp.posterior = prior;
    for (auto& est : state.estimates) {
      if (est.id != cls_id) continue;
      Theta t = theta_of(est);
      for (int p = 0; p < 4; ++p) {
        if (prior.params[p].free) t[p] = post.mean[p];
      }
      est = with_theta(est, t);
    }
    rep.posteriors.push_back(cp);
    rep.samples.emplace(cls_id, std::move(post));
  }

  rep.methods.push_back(std::move(auction_method));
  rep.methods.push_back(std::move(slice));
  return rep;
}

Comparison compare_methods(const Scenario& sc) {
  const int K = sc.num_nps();
  const auto capacity = sc.capacity();
  const Market market = build_market(sc, sc.classes);
  Comparison cmp;
  AuctionResult ar = run_auction(market, sc.auction, sc.bnb);
  cmp.trace = std::move(ar.trace);
  cmp.certificate = std::move(ar.certificate);
  const auto raw = column_total(demanded(cmp.certificate), K);
  const auto xhat = ration(demanded(cmp.certificate), capacity);

  std::vector<std::vector<std::vector<double>>> r_auction(sc.sps.size());
  for (std::size_t m = 0; m < sc.sps.size(); ++m) {
    r_auction[m] = cmp.certificate.demands[m].r;
    for (auto& row : r_auction[m]) {
      for (int k = 0; k < K; ++k) {
        if (raw[k] > capacity[k]) row[k] *= capacity[k] / raw[k];
      }
    }
  }
  cmp.methods.push_back(assemble("auction", sc, sc.classes, r_auction));

  double gap = 0.0;
  cmp.methods.push_back(assemble("spp", sc, sc.classes, solve_slices(market, xhat, sc.bnb, gap)));
  cmp.methods.back().bound_gap = gap;

  std::vector<double> alpha = sc.overbook_alpha;
  if (alpha.empty()) alpha.assign(K, 0.0);
  std::vector<std::vector<double>> supply = xhat;
  for (auto& row : supply) row = overbook(row, alpha);
  MethodResult ospp = assemble("ospp", sc, sc.classes, solve_slices(market, supply, sc.bnb, gap));
  ospp.bound_gap = gap;
  const auto used = column_total(ospp.x, K);
  const auto bought = column_total(xhat, K);
  ospp.oversell.resize(K);
  for (int k = 0; k < K; ++k) ospp.oversell[k] = std::max(0.0, used[k] - bought[k]);
  cmp.methods.push_back(std::move(ospp));

  const SigProgResult swm = solve_swm(market.sps, capacity, sc.bnb);
  std::vector<std::vector<std::vector<double>>> r_swm(sc.sps.size());
  std::size_t pos = 0;
  for (std::size_t m = 0; m < sc.sps.size(); ++m) {
    for (std::size_t i = 0; i < sc.sps[m].users.size(); ++i) r_swm[m].push_back(swm.r[pos++]);
  }
  MethodResult swm_method = assemble("swm", sc, sc.classes, r_swm);
  swm_method.bound_gap = swm.gap;
  cmp.methods.push_back(std::move(swm_method));

  for (auto& m : cmp.methods) price_allocation(m, sc, sc.classes);
  return cmp;
}

void write_allocations_csv(std::span<const MethodResult> methods, int num_nps, std::ostream& out) {
  out << "method,sp,np,user,r,z,p,expected_revenue\n";
  for (const auto& m : methods) {
    for (const auto& ua : m.users) {
      for (int k = 0; k < num_nps; ++k) {
        fmt::print(out, "{},{},{},{},{},{},{},{}\n", m.method, ua.sp, k + 1, ua.user, ua.r[k], ua.z, ua.p,
                   ua.expected_revenue);
      }
    }
  }
}

void write_cycle_reports_json(std::span<const CycleReport> reports, const Scenario& sc, std::ostream& out) {
  json doc;
  doc["seed"] = sc.seed;
  doc["cycles"] = json::array();
  for (const auto& rep : reports) {
    json j;
    j["cycle"] = rep.cycle;
    j["estimates"] = json::array();
    for (const auto& c : rep.estimates) {
      j["estimates"].push_back({{"id", c.id}, {"t_z", c.t_z}, {"k", c.k}, {"t_p", c.t_p}, {"b", c.b}});
    }
    j["auction"] = {{"converged", rep.trace.converged},
                    {"oscillating", rep.trace.oscillating},
                    {"iterations", rep.trace.iterations},
                    {"diagnostic", rep.trace.diagnostic}};
    const auto& cert = rep.certificate;
    json sps = json::array();
    for (const auto& s : cert.sps) {
      sps.push_back({{"sp", s.sp},
                     {"epsilon", s.epsilon},
                     {"delta1", s.delta1},
                     {"delta2", s.delta2},
                     {"psi_star", s.psi_star},
                     {"psi_star_gap", s.psi_star_gap},
                     {"profit_lo", s.profit_lo},
                     {"profit_hi", s.profit_hi},
                     {"realized", s.realized},
                     {"in_band", s.in_band}});
    }
    j["certificate"] = {{"c_dagger", cert.c_dagger}, {"excess_norm", cert.excess_norm},
                        {"tol", cert.tol},           {"supply_gap", cert.supply_gap},
                        {"supply_ok", cert.supply_ok}, {"bands_ok", cert.bands_ok},
                        {"valid", cert.valid},       {"sps", sps}};
    j["acquired"] = rep.acquired;
    j["perceived_revenue"] = rep.perceived_revenue;
    j["actual_revenue"] = rep.actual_revenue;
    j["realized_revenue"] = rep.realized_revenue;
    j["methods"] = json::array();
    for (const auto& m : rep.methods) j["methods"].push_back(method_json(m));
    j["feedback"] = json::array();
    for (const auto& f : rep.feedback) {
      j["feedback"].push_back(
          {{"user", f.user_id}, {"cycle", f.cycle}, {"z", f.z}, {"p", f.p}, {"satisfied", f.satisfied}});
    }
    j["posteriors"] = json::array();
    for (const auto& p : rep.posteriors) {
      j["posteriors"].push_back({{"class", p.class_id},
                                 {"records", p.records},
                                 {"mean", theta_json(p.mean)},
                                 {"std", theta_json(p.std)},
                                 {"acceptance_rate", p.acceptance_rate},
                                 {"ess_hint", p.ess_hint},
                                 {"tuning_warning", p.tuning_warning},
                                 {"prior", prior_json(p.prior)},
                                 {"next_prior", prior_json(p.posterior)}});
    }
    doc["cycles"].push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace netslice
