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

#include "netslice/sigprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "netslice/alloc_ipm.hpp"

namespace netslice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Relaxation {
  double bound = -kInf;
  double value = -kInf;
  std::vector<double> r;  // user-major
  int branch_user = -1;
  double split = 0.0;
};

struct Node {
  std::vector<double> lo, hi;
  Relaxation rel;
  long id = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.rel.bound != b.rel.bound) return a.rel.bound < b.rel.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const SigProgInstance& inst, const BnBOptions& opt) : inst_(inst), opt_(opt) {
    n_ = static_cast<int>(inst.users.size());
    K_ = inst.num_nps;
    cap_.assign(K_, kInf);
    if (!inst.capacity.empty()) cap_ = inst.capacity;
    price_.assign(K_, 0.0);
    if (!inst.price.empty()) price_ = inst.price;
    if (static_cast<int>(cap_.size()) != K_ || static_cast<int>(price_.size()) != K_) {
      throw std::invalid_argument("capacity and price must have one entry per NP");
    }
    double wsum = 0.0;
    double max_marginal = 0.0;
    double min_beta = 1.0;
    for (const auto& u : inst.users) {
      if (static_cast<int>(u.beta.size()) != K_) {
        throw std::invalid_argument("user beta has the wrong dimension");
      }
      wsum += u.weight;
      max_marginal = std::max(max_marginal, u.weight * u.cls.t_z / 4.0);
      for (double b : u.beta) min_beta = std::min(min_beta, b);
    }
    tol_ = opt.tol > 0.0 ? opt.tol : 1e-3 * wsum;
    // Resource levels beyond which the cost exceeds all attainable utility.
    std::vector<double> reach(K_);
    double max_cost = 0.0;
    for (int k = 0; k < K_; ++k) {
      double c = cap_[k];
      if (price_[k] > 0.0) c = std::min(c, wsum / price_[k]);
      if (inst.lambda > 0.0) c = std::min(c, std::sqrt(wsum / inst.lambda));
      reach[k] = std::max(c, 0.0);
      if (std::isfinite(reach[k])) max_cost = std::max(max_cost, price_[k] + 2.0 * inst.lambda * reach[k]);
    }
    hi0_.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < K_; ++k) hi0_[i] += inst.users[i].beta[k] * reach[k];
      if (!std::isfinite(hi0_[i])) {
        throw std::invalid_argument("unbounded program: no capacity, price or regularization");
      }
    }
    penalty_ = 10.0 * (max_marginal + max_cost / min_beta) + 1.0;
  }

  SigProgResult run() {
    SigProgResult res;
    res.tol = tol_;
    Node root;
    root.lo.assign(n_, 0.0);
    root.hi = hi0_;
    root.rel = relax(root.lo, root.hi);
    long nodes = 1;
    double incumbent = root.rel.value;
    std::vector<double> best = root.rel.r;
    double closed = root.rel.value;  // max bound over discarded nodes
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 1;
    auto settle = [&](Node&& node) {
      if (node.rel.branch_user < 0 || node.rel.bound <= incumbent + tol_) {
        closed = std::max(closed, node.rel.bound);
      } else {
        open.push(std::move(node));
      }
    };
    settle(std::move(root));
    auto upper = [&] {
      double ub = std::max(closed, incumbent);
      if (!open.empty()) ub = std::max(ub, open.top().rel.bound);
      return ub;
    };
    if (opt_.record_trace) res.trace.push_back({nodes, incumbent, upper()});

    while (!open.empty() && nodes < opt_.node_budget) {
      std::vector<Node> parents;
      while (!open.empty() && static_cast<int>(parents.size()) < std::max(1, opt_.batch)) {
        Node top = open.top();
        open.pop();
        if (top.rel.bound <= incumbent + tol_) {
          closed = std::max(closed, top.rel.bound);
          continue;
        }
        parents.push_back(std::move(top));
      }
      if (parents.empty()) break;
      std::vector<Node> children;
      children.reserve(2 * parents.size());
      for (const auto& p : parents) {
        const int b = p.rel.branch_user;
        Node left{p.lo, p.hi, {}, next_id++};
        left.hi[b] = p.rel.split;
        Node right{p.lo, p.hi, {}, next_id++};
        right.lo[b] = p.rel.split;
        children.push_back(std::move(left));
        children.push_back(std::move(right));
      }
      const int nc = static_cast<int>(children.size());
#pragma omp parallel for schedule(dynamic, 1) if (opt_.parallel)
      for (int j = 0; j < nc; ++j) {
        children[j].rel = relax(children[j].lo, children[j].hi);
      }
      nodes += nc;
      for (int j = 0; j < nc; ++j) {
        Node& c = children[j];
        c.rel.bound = std::min(c.rel.bound, parents[j / 2].rel.bound);
        if (c.rel.value > incumbent) {
          incumbent = c.rel.value;
          best = c.rel.r;
        }
      }
      for (auto& c : children) settle(std::move(c));
      if (opt_.record_trace) res.trace.push_back({nodes, incumbent, upper()});
    }

    res.nodes = nodes;
    res.value = incumbent;
    res.upper_bound = upper();
    res.gap = std::max(0.0, res.upper_bound - incumbent);
    res.optimal = res.gap <= tol_;
    res.r.resize(n_);
    res.z.assign(n_, 0.0);
    res.y.assign(K_, 0.0);
    for (int i = 0; i < n_; ++i) {
      res.r[i].assign(best.begin() + static_cast<std::size_t>(i) * K_,
                      best.begin() + static_cast<std::size_t>(i + 1) * K_);
      for (int k = 0; k < K_; ++k) {
        res.z[i] += inst_.users[i].beta[k] * res.r[i][k];
        res.y[k] += res.r[i][k];
      }
    }
    return res;
  }

 private:
  Relaxation relax(const std::vector<double>& lo, const std::vector<double>& hi) const {
    AllocProblem p;
    p.num_nps = K_;
    p.price = price_;
    p.lambda = inst_.lambda;
    p.capacity = cap_;
    p.elastic_penalty = penalty_;
    p.terms.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const auto& u = inst_.users[i];
      p.terms[i] = {&u.cls, u.weight, interval_envelope(u.cls, lo[i], hi[i]), u.beta};
    }
    const AllocSolution sol = solve_alloc(p);
    Relaxation rel;
    rel.bound = sol.penalized_objective + sol.duality_gap + 1e-9 * (1.0 + std::abs(sol.penalized_objective));
    rel.r = sol.r;
    purify_chords(p, rel.r);

    std::vector<double> z(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < K_; ++k) z[i] += p.terms[i].beta[k] * rel.r[static_cast<std::size_t>(i) * K_ + k];
    }
    rel.value = objective(rel.r);
    double worst = 1e-12 * (1.0 + std::abs(rel.bound));
    for (int i = 0; i < n_; ++i) {
      const double width = hi[i] - lo[i];
      if (!(width > 1e-9 * (1.0 + hi[i]))) continue;
      const auto& u = inst_.users[i];
      const double gap = eval_term(p.terms[i], z[i]).value - u.weight * detail::sigmoid(u.cls, z[i]);
      if (gap > worst) {
        worst = gap;
        rel.branch_user = i;
        const double margin = 1e-7 * (1.0 + width);
        rel.split = (z[i] > lo[i] + margin && z[i] < hi[i] - margin) ? z[i] : 0.5 * (lo[i] + hi[i]);
      }
    }
    return rel;
  }

  double objective(const std::vector<double>& r) const {
    double f = 0.0;
    std::vector<double> y(K_, 0.0);
    for (int i = 0; i < n_; ++i) {
      const auto& u = inst_.users[i];
      double z = 0.0;
      for (int k = 0; k < K_; ++k) {
        const double v = r[static_cast<std::size_t>(i) * K_ + k];
        z += u.beta[k] * v;
        y[k] += v;
      }
      f += u.weight * detail::sigmoid(u.cls, z);
    }
    for (int k = 0; k < K_; ++k) f -= price_[k] * y[k] + inst_.lambda * y[k] * y[k];
    return f;
  }

  const SigProgInstance& inst_;
  const BnBOptions& opt_;
  int n_ = 0, K_ = 0;
  std::vector<double> cap_, price_, hi0_;
  double tol_ = 0.0;
  double penalty_ = 0.0;
};

SigProgInstance instance_of(const SliceModel& sp, int group) {
  SigProgInstance inst;
  inst.num_nps = sp.num_nps;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    inst.users.push_back({sp.classes[i], sp.weights[i], sp.beta[i], group});
  }
  return inst;
}

}  // namespace

SigProgResult maximize_sum_sigmoids(const SigProgInstance& instance, const BnBOptions& options) {
  BranchAndBound bnb(instance, options);
  return bnb.run();
}

SigProgResult solve_in_sl(const SliceModel& sp, std::span<const double> x, const BnBOptions& options) {
  SigProgInstance inst = instance_of(sp, 0);
  inst.capacity.assign(x.begin(), x.end());
  return maximize_sum_sigmoids(inst, options);
}

SigProgResult solve_swm(std::span<const SliceModel> sps, std::span<const double> capacity,
                        const BnBOptions& options) {
  SigProgInstance inst;
  inst.num_nps = static_cast<int>(capacity.size());
  inst.capacity.assign(capacity.begin(), capacity.end());
  for (std::size_t m = 0; m < sps.size(); ++m) {
    SigProgInstance part = instance_of(sps[m], static_cast<int>(m));
    inst.users.insert(inst.users.end(), part.users.begin(), part.users.end());
  }
  return maximize_sum_sigmoids(inst, options);
}

SigProgResult solve_exact_demand(const SliceModel& sp, std::span<const double> c,
                                 const BnBOptions& options) {
  SigProgInstance inst = instance_of(sp, 0);
  inst.price.assign(c.begin(), c.end());
  inst.lambda = sp.lambda;
  return maximize_sum_sigmoids(inst, options);
}

double sigprog_objective(const SigProgInstance& instance, const std::vector<std::vector<double>>& r) {
  const int K = instance.num_nps;
  std::vector<double> y(K, 0.0);
  double f = 0.0;
  for (std::size_t i = 0; i < instance.users.size(); ++i) {
    const auto& u = instance.users[i];
    double z = 0.0;
    for (int k = 0; k < K; ++k) {
      z += u.beta[k] * r[i][k];
      y[k] += r[i][k];
    }
    f += u.weight * detail::sigmoid(u.cls, z);
  }
  for (int k = 0; k < K; ++k) {
    const double price = instance.price.empty() ? 0.0 : instance.price[k];
    f -= price * y[k] + instance.lambda * y[k] * y[k];
  }
  return f;
}

}  // namespace netslice
