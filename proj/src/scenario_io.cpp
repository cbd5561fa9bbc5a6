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

#include "netslice/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace netslice {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where, "unknown key '" + key + "'");
  }
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing required key '") + key + "'");
  return j.at(key);
}

template <class T>
T as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    fail(where, "wrong type");
  }
}

template <class T>
void opt(const json& j, const std::string& where, const char* key, T& out) {
  if (j.contains(key)) out = as<T>(j.at(key), where + "." + key);
}

int param_index(const std::string& name) {
  for (int p = 0; p < 4; ++p) {
    if (name == kParamNames[p]) return p;
  }
  return -1;
}

Scenario from_json(const json& doc) {
  Scenario sc;
  only_keys(doc, "scenario", {"nps", "classes", "sps", "auction", "pricing", "overbook", "bnb", "mcmc", "seed", "cycles"});

  const json& nps = need(doc, "scenario", "nps");
  if (!nps.is_array()) fail("nps", "expected a list");
  for (std::size_t i = 0; i < nps.size(); ++i) {
    const std::string w = "nps[" + std::to_string(i) + "]";
    only_keys(nps[i], w, {"id", "capacity"});
    sc.nps.push_back({as<std::string>(need(nps[i], w, "id"), w + ".id"),
                      as<double>(need(nps[i], w, "capacity"), w + ".capacity")});
  }

  const json& classes = need(doc, "scenario", "classes");
  if (!classes.is_array()) fail("classes", "expected a list");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string w = "classes[" + std::to_string(i) + "]";
    const json& c = classes[i];
    only_keys(c, w, {"id", "t_z", "k", "t_p", "b"});
    ServiceClass cls;
    cls.id = as<std::string>(need(c, w, "id"), w + ".id");
    cls.t_z = as<double>(need(c, w, "t_z"), w + ".t_z");
    cls.k = as<double>(need(c, w, "k"), w + ".k");
    opt(c, w, "t_p", cls.t_p);
    opt(c, w, "b", cls.b);
    sc.classes.push_back(cls);
  }

  const json& sps = need(doc, "scenario", "sps");
  if (!sps.is_array()) fail("sps", "expected a list");
  for (std::size_t i = 0; i < sps.size(); ++i) {
    std::string w = "sps[" + std::to_string(i) + "]";
    const json& s = sps[i];
    only_keys(s, w, {"id", "lambda", "users"});
    SPSpec sp;
    sp.id = as<std::string>(need(s, w, "id"), w + ".id");
    w = "sps." + sp.id;
    sp.lambda = as<double>(need(s, w, "lambda"), w + ".lambda");
    const json& users = need(s, w, "users");
    if (!users.is_array()) fail(w + ".users", "expected a list");
    for (std::size_t u = 0; u < users.size(); ++u) {
      std::string uw = w + ".users[" + std::to_string(u) + "]";
      only_keys(users[u], uw, {"id", "class", "beta", "weight"});
      UserSpec us;
      us.id = as<std::string>(need(users[u], uw, "id"), uw + ".id");
      uw = w + ".users." + us.id;
      us.class_id = as<std::string>(need(users[u], uw, "class"), uw + ".class");
      us.beta = as<std::vector<double>>(need(users[u], uw, "beta"), uw + ".beta");
      opt(users[u], uw, "weight", us.weight);
      sp.users.push_back(std::move(us));
    }
    sc.sps.push_back(std::move(sp));
  }

  if (doc.contains("auction")) {
    const json& a = doc.at("auction");
    only_keys(a, "auction", {"kappa", "c_init", "tol", "max_iter", "price_floor", "window", "certify"});
    opt(a, "auction", "kappa", sc.auction.kappa);
    opt(a, "auction", "c_init", sc.auction.c_init);
    opt(a, "auction", "tol", sc.auction.tol);
    opt(a, "auction", "max_iter", sc.auction.max_iter);
    opt(a, "auction", "price_floor", sc.auction.price_floor);
    opt(a, "auction", "window", sc.auction.window);
    opt(a, "auction", "certify", sc.auction.certify);
  }
  if (doc.contains("pricing")) {
    only_keys(doc.at("pricing"), "pricing", {"enabled"});
    opt(doc.at("pricing"), "pricing", "enabled", sc.pricing_enabled);
  }
  if (doc.contains("overbook")) {
    only_keys(doc.at("overbook"), "overbook", {"alpha"});
    opt(doc.at("overbook"), "overbook", "alpha", sc.overbook_alpha);
  }
  if (doc.contains("bnb")) {
    const json& b = doc.at("bnb");
    only_keys(b, "bnb", {"tol", "node_budget", "batch", "parallel"});
    opt(b, "bnb", "tol", sc.bnb.tol);
    opt(b, "bnb", "node_budget", sc.bnb.node_budget);
    opt(b, "bnb", "batch", sc.bnb.batch);
    opt(b, "bnb", "parallel", sc.bnb.parallel);
  }
  if (doc.contains("mcmc")) {
    const json& m = doc.at("mcmc");
    only_keys(m, "mcmc", {"n_samples", "burn_in", "proposal_scale", "thin", "priors"});
    opt(m, "mcmc", "n_samples", sc.mcmc.n_samples);
    opt(m, "mcmc", "burn_in", sc.mcmc.burn_in);
    opt(m, "mcmc", "proposal_scale", sc.mcmc.proposal_scale);
    opt(m, "mcmc", "thin", sc.mcmc.thin);
    if (m.contains("priors")) {
      const json& pr = m.at("priors");
      if (!pr.is_object()) fail("mcmc.priors", "expected an object");
      for (const auto& [cls_id, params] : pr.items()) {
        const std::string w = "mcmc.priors." + cls_id;
        const ServiceClass* cls = nullptr;
        for (const auto& c : sc.classes) {
          if (c.id == cls_id) cls = &c;
        }
        if (!cls) fail(w, "unknown class '" + cls_id + "'");
        PriorSpec spec = fixed_prior(*cls);
        if (!params.is_object()) fail(w, "expected an object");
        for (const auto& [name, pp] : params.items()) {
          const int p = param_index(name);
          if (p < 0) fail(w, "unknown parameter '" + name + "'");
          const std::string pw = w + "." + name;
          only_keys(pp, pw, {"mean", "std", "free"});
          spec.params[p].mean = as<double>(need(pp, pw, "mean"), pw + ".mean");
          spec.params[p].std = as<double>(need(pp, pw, "std"), pw + ".std");
          spec.params[p].free = true;
          opt(pp, pw, "free", spec.params[p].free);
        }
        sc.mcmc.priors.emplace(cls_id, spec);
      }
    }
  }
  opt(doc, "scenario", "seed", sc.seed);
  opt(doc, "scenario", "cycles", sc.cycles);
  return sc;
}

json to_json(const Scenario& sc) {
  json doc;
  doc["nps"] = json::array();
  for (const auto& np : sc.nps) doc["nps"].push_back({{"id", np.id}, {"capacity", np.capacity}});
  doc["classes"] = json::array();
  for (const auto& c : sc.classes) {
    doc["classes"].push_back({{"id", c.id}, {"t_z", c.t_z}, {"k", c.k}, {"t_p", c.t_p}, {"b", c.b}});
  }
  doc["sps"] = json::array();
  for (const auto& sp : sc.sps) {
    json users = json::array();
    for (const auto& u : sp.users) {
      users.push_back({{"id", u.id}, {"class", u.class_id}, {"beta", u.beta}, {"weight", u.weight}});
    }
    doc["sps"].push_back({{"id", sp.id}, {"lambda", sp.lambda}, {"users", users}});
  }
  const auto& a = sc.auction;
  doc["auction"] = {{"kappa", a.kappa},         {"c_init", a.c_init},
                    {"tol", a.tol},             {"max_iter", a.max_iter},
                    {"price_floor", a.price_floor}, {"window", a.window},
                    {"certify", a.certify}};
  doc["pricing"] = {{"enabled", sc.pricing_enabled}};
  doc["overbook"] = {{"alpha", sc.overbook_alpha}};
  doc["bnb"] = {{"tol", sc.bnb.tol},
                {"node_budget", sc.bnb.node_budget},
                {"batch", sc.bnb.batch},
                {"parallel", sc.bnb.parallel}};
  json priors = json::object();
  for (const auto& [id, spec] : sc.mcmc.priors) {
    json params = json::object();
    for (int p = 0; p < 4; ++p) {
      const auto& pp = spec.params[p];
      params[kParamNames[p]] = {{"mean", pp.mean}, {"std", pp.std}, {"free", pp.free}};
    }
    priors[id] = params;
  }
  doc["mcmc"] = {{"n_samples", sc.mcmc.n_samples},
                 {"burn_in", sc.mcmc.burn_in},
                 {"proposal_scale", sc.mcmc.proposal_scale},
                 {"thin", sc.mcmc.thin},
                 {"priors", priors}};
  doc["seed"] = sc.seed;
  doc["cycles"] = sc.cycles;
  return doc;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("parse error: ") + e.what());
  }
  Scenario sc = from_json(doc);
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string emit_scenario(const Scenario& scenario) { return to_json(scenario).dump(2) + "\n"; }

}  // namespace netslice
