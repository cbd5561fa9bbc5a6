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

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netslice/auction.hpp"
#include "netslice/inference.hpp"
#include "netslice/market.hpp"
#include "netslice/scenario_io.hpp"
#include "netslice/sigprog.hpp"
#include "netslice/solver.hpp"
#include "netslice/utility.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace netslice;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string scenario;
  std::string out = ".";
  std::optional<double> kappa;
  std::optional<double> tol;
  std::optional<long> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<double> overbook;
  std::optional<int> cycles;
  std::vector<double> prices;
  std::vector<double> init;
  std::string feedback;
  std::string class_id;
  std::optional<double> t_z;
  std::optional<double> k;
};

std::ofstream open_out(const Flags& f, const std::string& name) {
  fs::create_directories(f.out);
  const fs::path path = fs::path(f.out) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

Scenario resolve(const Flags& f) {
  Scenario sc = load_scenario(f.scenario);
  if (f.kappa) sc.auction.kappa = *f.kappa;
  if (f.tol) sc.auction.tol = *f.tol;
  if (f.max_iter) sc.auction.max_iter = *f.max_iter;
  if (f.seed) sc.seed = *f.seed;
  if (f.cycles) sc.cycles = *f.cycles;
  if (f.overbook) sc.overbook_alpha.assign(sc.num_nps(), *f.overbook);
  if (!f.init.empty()) sc.auction.c_init = f.init;
  sc.validate();
  fmt::print("seed={}\n", sc.seed);
  return sc;
}

json certificate_json(const EquilibriumCertificate& cert) {
  json sps = json::array();
  for (const auto& s : cert.sps) {
    sps.push_back({{"sp", s.sp},
                   {"epsilon", s.epsilon},
                   {"delta1", s.delta1},
                   {"delta2", s.delta2},
                   {"psi_star", s.psi_star},
                   {"profit_lo", s.profit_lo},
                   {"profit_hi", s.profit_hi},
                   {"realized", s.realized},
                   {"in_band", s.in_band}});
  }
  return {{"c_dagger", cert.c_dagger}, {"excess_norm", cert.excess_norm}, {"tol", cert.tol},
          {"supply_gap", cert.supply_gap}, {"supply_ok", cert.supply_ok}, {"bands_ok", cert.bands_ok},
          {"valid", cert.valid},       {"sps", sps}};
}

int cmd_envelope(const Flags& f) {
  std::vector<ServiceClass> classes;
  if (!f.scenario.empty()) {
    classes = resolve(f).classes;
  } else {
    if (!f.t_z || !f.k) throw InputError("envelope needs a scenario or both --tz and --k");
    ServiceClass cls{"cli", *f.t_z, *f.k, 0.0, 0.0};
    cls.validate();
    classes.push_back(cls);
    fmt::print("seed={}\n", f.seed.value_or(Scenario{}.seed));
  }
  auto out = open_out(f, "envelope.csv");
  const std::string header = "class,t_z,k,w,slope,rho,rho_at\n";
  out << header;
  std::cout << header;
  for (const auto& cls : classes) {
    const Envelope env = build_envelope(cls);
    const Nonconcavity nc = nonconcavity(cls, env);
    const std::string row = fmt::format("{},{},{},{},{},{},{}\n", cls.id, cls.t_z, cls.k, env.w, env.slope, nc.rho, nc.at);
    out << row;
    std::cout << row;
  }
  return 0;
}

int cmd_demand(const Flags& f) {
  const Scenario sc = resolve(f);
  if (static_cast<int>(f.prices.size()) != sc.num_nps()) {
    throw InputError(fmt::format("--prices: expected {} entries", sc.num_nps()));
  }
  const Market market = build_market(sc, sc.classes);
  json doc;
  doc["prices"] = f.prices;
  doc["sps"] = json::array();
  bool ok = true;
  for (std::size_t m = 0; m < market.sps.size(); ++m) {
    const DemandResult d = solve_demand(market.sps[m], f.prices);
    ok = ok && d.converged;
    json users = json::array();
    for (std::size_t i = 0; i < d.r.size(); ++i) {
      users.push_back({{"user", sc.sps[m].users[i].id}, {"r", d.r[i]}, {"z", d.z[i]}});
    }
    doc["sps"].push_back({{"sp", sc.sps[m].id}, {"x", d.x}, {"value", d.value}, {"kkt_residual", d.kkt_residual},
                          {"iterations", d.iterations}, {"converged", d.converged}, {"users", users}});
    fmt::print("{}: x=[{}] converged={}\n", sc.sps[m].id, fmt::join(d.x, ", "), d.converged);
  }
  open_out(f, "demand.json") << doc.dump(2) << '\n';
  return ok ? 0 : 1;
}

int cmd_auction(const Flags& f) {
  const Scenario sc = resolve(f);
  const Market market = build_market(sc, sc.classes);
  const AuctionResult res = run_auction(market, sc.auction, sc.bnb);
  auto trace_out = open_out(f, "auction_trace.csv");
  write_trace_csv(res.trace, sc.num_nps(), trace_out);
  json cert = certificate_json(res.certificate);
  cert["converged"] = res.trace.converged;
  cert["iterations"] = res.trace.iterations;
  cert["diagnostic"] = res.trace.diagnostic;
  open_out(f, "certificate.json") << cert.dump(2) << '\n';
  const auto& last = res.trace.records.back();
  fmt::print("converged={} iterations={} c=[{}] excess_norm={} tol={}\n", res.trace.converged,
             res.trace.iterations, fmt::join(last.c, ", "), last.znorm, res.certificate.tol);
  if (!res.trace.diagnostic.empty()) fmt::print("diagnostic: {}\n", res.trace.diagnostic);
  return res.trace.converged ? 0 : 1;
}

int cmd_cycle(const Flags& f) {
  const Scenario sc = resolve(f);
  MarketState state = initial_state(sc);
  std::vector<CycleReport> reports;
  std::vector<FeedbackRecord> feedback;
  for (int c = 0; c < sc.cycles; ++c) {
    reports.push_back(run_cycle(sc, state));
    const auto& rep = reports.back();
    feedback.insert(feedback.end(), rep.feedback.begin(), rep.feedback.end());
    for (const auto& [cls, post] : rep.samples) {
      auto out = open_out(f, fmt::format("posterior_{}_cycle{}.csv", cls, rep.cycle));
      write_posterior_csv(post, out);
    }
    fmt::print("cycle {}: auction converged={} acquired=[{}] perceived=[{}] actual=[{}]\n", rep.cycle,
               rep.trace.converged, fmt::join(rep.acquired, ", "), fmt::join(rep.perceived_revenue, ", "),
               fmt::join(rep.actual_revenue, ", "));
    for (const auto& p : rep.posteriors) {
      fmt::print("  {} posterior mean t_p={} b={} t_z={} k={}\n", p.class_id, p.mean[kTp], p.mean[kB], p.mean[kTz],
                 p.mean[kK]);
    }
  }
  auto rep_out = open_out(f, "cycle_report.json");
  write_cycle_reports_json(reports, sc, rep_out);
  auto alloc_out = open_out(f, "allocations.csv");
  write_allocations_csv(reports.back().methods, sc.num_nps(), alloc_out);
  auto fb_out = open_out(f, "feedback.csv");
  write_feedback_csv(feedback, fb_out);
  return 0;
}

int cmd_swm(const Flags& f) {
  const Scenario sc = resolve(f);
  const Market market = build_market(sc, sc.classes);
  const SigProgResult res = solve_swm(market.sps, sc.capacity(), sc.bnb);
  auto out = open_out(f, "swm.csv");
  out << "sp,user,np,r,z\n";
  std::size_t pos = 0;
  for (const auto& sp : sc.sps) {
    for (const auto& u : sp.users) {
      for (int k = 0; k < sc.num_nps(); ++k) {
        fmt::print(out, "{},{},{},{},{}\n", sp.id, u.id, sc.nps[k].id, res.r[pos][k], res.z[pos]);
      }
      ++pos;
    }
  }
  fmt::print("welfare={} upper_bound={} gap={} nodes={} optimal={}\n", res.value, res.upper_bound, res.gap, res.nodes,
             res.optimal);
  return 0;
}

int cmd_infer(const Flags& f) {
  const Scenario sc = resolve(f);
  if (f.feedback.empty()) throw InputError("infer needs --feedback");
  std::ifstream in(f.feedback);
  if (!in) throw InputError("cannot open feedback file '" + f.feedback + "'");
  std::string cls = f.class_id;
  if (cls.empty()) {
    if (sc.mcmc.priors.size() != 1) throw InputError("infer needs --class when the scenario has several priors");
    cls = sc.mcmc.priors.begin()->first;
  }
  const auto it = sc.mcmc.priors.find(cls);
  if (it == sc.mcmc.priors.end()) throw InputError("mcmc.priors has no entry for class '" + cls + "'");
  std::set<std::string> members;
  for (const auto& sp : sc.sps) {
    for (const auto& u : sp.users) {
      if (u.class_id == cls) members.insert(u.id);
    }
  }
  std::vector<FeedbackRecord> records;
  for (auto& r : read_feedback_csv(in)) {
    if (members.count(r.user_id)) records.push_back(std::move(r));
  }
  MCMCOptions mo;
  mo.n_samples = sc.mcmc.n_samples;
  mo.burn_in = sc.mcmc.burn_in;
  mo.proposal_scale = sc.mcmc.proposal_scale;
  mo.thin = sc.mcmc.thin;
  mo.seed = sc.seed;
  const Posterior post = metropolis_sample(it->second, records, mo);
  auto out = open_out(f, "posterior.csv");
  write_posterior_csv(post, out);
  fmt::print("records={} acceptance={} tuning_warning={}\n", records.size(), post.acceptance_rate, post.tuning_warning);
  for (int p = 0; p < 4; ++p) {
    fmt::print("{}: mean={} std={}\n", kParamNames[p], post.mean[p], post.std[p]);
  }
  return 0;
}

int cmd_compare(const Flags& f) {
  Scenario sc = resolve(f);
  const Comparison cmp = compare_methods(sc);
  auto alloc = open_out(f, "allocations.csv");
  write_allocations_csv(cmp.methods, sc.num_nps(), alloc);
  auto res = open_out(f, "resources.csv");
  res << "method,sp,np,x\n";
  auto rev = open_out(f, "revenue.csv");
  rev << "method,sp,revenue\n";
  for (const auto& m : cmp.methods) {
    for (std::size_t s = 0; s < sc.sps.size(); ++s) {
      for (int k = 0; k < sc.num_nps(); ++k) fmt::print(res, "{},{},{},{}\n", m.method, sc.sps[s].id, sc.nps[k].id, m.x[s][k]);
      fmt::print(rev, "{},{},{}\n", m.method, sc.sps[s].id, m.revenue[s]);
    }
    fmt::print(rev, "{},total,{}\n", m.method, m.total_revenue);
    fmt::print("{}: revenue={} bound_gap={}\n", m.method, m.total_revenue, m.bound_gap);
  }
  fmt::print("auction converged={} c=[{}]\n", cmp.trace.converged, fmt::join(cmp.certificate.c_dagger, ", "));
  return cmp.trace.converged ? 0 : 1;
}

void report_error(const std::string& kind, const std::string& message) {
  json err = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network slicing market engine"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* opt = sub->add_option("scenario", f.scenario, "Scenario file");
    if (needs_scenario) opt->required();
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--seed", f.seed, "RNG seed");
    sub->add_option("--kappa", f.kappa, "Auction step size");
    sub->add_option("--tol", f.tol, "Auction stopping threshold on the excess demand norm");
    sub->add_option("--max-iter", f.max_iter, "Auction iteration cap");
    sub->add_option("--overbook", f.overbook, "Overbooking percentage applied to every NP");
    sub->add_option("--cycles", f.cycles, "Number of market cycles");
    sub->add_option("--init", f.init, "Initial price vector")->delimiter(',');
  };

  auto* envelope = app.add_subcommand("envelope", "Concave envelope per class");
  common(envelope, false);
  envelope->add_option("--tz", f.t_z, "QoS sensitivity of an ad hoc class");
  envelope->add_option("--k", f.k, "QoS prerequisite of an ad hoc class");
  auto* demand = app.add_subcommand("demand", "SP demand at fixed prices");
  common(demand, true);
  demand->add_option("--prices", f.prices, "Price per NP")->delimiter(',')->required();
  auto* auction = app.add_subcommand("auction", "Clock auction trace and certificate");
  common(auction, true);
  auto* cycle = app.add_subcommand("cycle", "Repeated market cycles with learning");
  common(cycle, true);
  auto* swm = app.add_subcommand("swm", "Centralized welfare maximization");
  common(swm, true);
  auto* infer = app.add_subcommand("infer", "Posterior sampling from a feedback file");
  common(infer, true);
  infer->add_option("--feedback", f.feedback, "Feedback CSV")->required();
  infer->add_option("--class", f.class_id, "Class whose prior is updated");
  auto* compare = app.add_subcommand("compare", "Auction, SPP, oSPP and SWM side by side");
  common(compare, true);

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == argv[1];
    if (!known) {
      report_error("usage", fmt::format("unknown subcommand '{}'", argv[1]));
      return 2;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (*envelope) return cmd_envelope(f);
    if (*demand) return cmd_demand(f);
    if (*auction) return cmd_auction(f);
    if (*cycle) return cmd_cycle(f);
    if (*swm) return cmd_swm(f);
    if (*infer) return cmd_infer(f);
    if (*compare) return cmd_compare(f);
  } catch (const InputError& e) {
    report_error("usage", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    report_error("invalid_input", e.what());
    return 3;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return 1;
  }
  return 0;
}
