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

#include "netslice/scenario.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace netslice {

std::vector<double> Scenario::capacity() const {
  std::vector<double> c;
  for (const auto& np : nps) c.push_back(np.capacity);
  return c;
}

const ServiceClass& Scenario::find_class(const std::string& id) const {
  for (const auto& c : classes) {
    if (c.id == id) return c;
  }
  throw std::invalid_argument("unknown class '" + id + "'");
}

void Scenario::validate() const {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (nps.empty()) fail("nps: at least one NP is required");
  std::set<std::string> ids;
  for (const auto& np : nps) {
    if (!ids.insert(np.id).second) fail("nps: duplicate id '" + np.id + "'");
    if (!(np.capacity > 0.0)) fail("nps." + np.id + ".capacity: must be > 0");
  }
  ids.clear();
  for (const auto& c : classes) {
    if (!ids.insert(c.id).second) fail("classes: duplicate id '" + c.id + "'");
    c.validate();
  }
  const int K = num_nps();
  std::set<std::string> sp_ids;
  for (const auto& sp : sps) {
    if (!sp_ids.insert(sp.id).second) fail("sps: duplicate id '" + sp.id + "'");
    if (!(sp.lambda > 0.0)) fail("sps." + sp.id + ".lambda: must be > 0");
    std::set<std::string> user_ids;
    for (const auto& u : sp.users) {
      const std::string where = "sps." + sp.id + ".users." + u.id;
      if (!user_ids.insert(u.id).second) fail(where + ": duplicate user id");
      if (!ids.count(u.class_id)) fail(where + ".class: unknown class '" + u.class_id + "'");
      if (static_cast<int>(u.beta.size()) != K) {
        fail(where + ".beta: expected " + std::to_string(K) + " entries, got " +
             std::to_string(u.beta.size()));
      }
      for (double b : u.beta) {
        if (!(b > 0.0 && b <= 1.0)) fail(where + ".beta: entries must lie in (0, 1]");
      }
      if (!(u.weight >= 0.0)) fail(where + ".weight: must be >= 0");
      if (pricing_enabled && !(find_class(u.class_id).t_p > 0.0)) {
        fail(where + ": pricing needs a class with t_p > 0");
      }
    }
  }
  if (!(auction.kappa > 0.0)) fail("auction.kappa: must be > 0");
  if (!(auction.price_floor > 0.0)) fail("auction.price_floor: must be > 0");
  if (auction.max_iter < 0) fail("auction.max_iter: must be >= 0");
  if (!auction.c_init.empty() && static_cast<int>(auction.c_init.size()) != K) {
    fail("auction.c_init: expected " + std::to_string(K) + " entries");
  }
  if (!overbook_alpha.empty()) {
    if (static_cast<int>(overbook_alpha.size()) != K) {
      fail("overbook.alpha: expected " + std::to_string(K) + " entries");
    }
    for (double a : overbook_alpha) {
      if (!(a >= 0.0)) fail("overbook.alpha: entries must be >= 0");
    }
  }
  if (bnb.node_budget < 1) fail("bnb.node_budget: must be >= 1");
  if (bnb.batch < 1) fail("bnb.batch: must be >= 1");
  const int burn = mcmc.burn_in >= 0 ? mcmc.burn_in : mcmc.n_samples / 5;
  if (mcmc.n_samples <= burn) fail("mcmc.n_samples: must exceed burn_in");
  if (!(mcmc.proposal_scale > 0.0)) fail("mcmc.proposal_scale: must be > 0");
  if (mcmc.thin < 1) fail("mcmc.thin: must be >= 1");
  for (const auto& [cls, prior] : mcmc.priors) {
    if (!ids.count(cls)) fail("mcmc.priors: unknown class '" + cls + "'");
    for (int j = 0; j < 4; ++j) {
      if (prior.params[j].free && !(prior.params[j].std > 0.0)) {
        fail("mcmc.priors." + cls + "." + kParamNames[j] + ".std: must be > 0");
      }
    }
  }
  if (cycles < 1) fail("cycles: must be >= 1");
}

Market build_market(const Scenario& scenario, std::span<const ServiceClass> catalog) {
  Market m;
  m.capacity = scenario.capacity();
  for (const auto& sp : scenario.sps) {
    m.sps.push_back(build_slice(sp, catalog, scenario.num_nps(), scenario.pricing_enabled));
  }
  return m;
}

}  // namespace netslice
