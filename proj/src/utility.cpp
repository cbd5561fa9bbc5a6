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

#include "netslice/utility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace netslice {

namespace {

constexpr double kEnvelopeTol = 1e-10;
constexpr int kMaxBisect = 400;

// logistic(a) * logistic(-a) without cancellation.
double logistic_product(double a) {
  const double e = std::exp(-std::abs(a));
  return e / ((1.0 + e) * (1.0 + e));
}

// Root of a function that is positive at lo and nonpositive at hi.
double bisect(const std::function<double(double)>& g, double lo, double hi,
              double tol) {
  for (int it = 0; it < kMaxBisect && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) {
    throw std::domain_error(std::string(what) + " must be nonnegative");
  }
}

}  // namespace

void ServiceClass::validate() const {
  if (!(t_z >= 0.0) || !(k >= 0.0) || !(t_p >= 0.0) || !(b >= 0.0)) {
    throw std::invalid_argument("service class '" + id +
                                "': t_z, k, t_p and b must be nonnegative");
  }
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_logistic(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

namespace detail {

double sigmoid(const ServiceClass& cls, double z) {
  return logistic(cls.t_z * (z - cls.k));
}

double sigmoid_d1(const ServiceClass& cls, double z) {
  return cls.t_z * logistic_product(cls.t_z * (z - cls.k));
}

double sigmoid_d2(const ServiceClass& cls, double z) {
  const double a = cls.t_z * (z - cls.k);
  return cls.t_z * cls.t_z * logistic_product(a) * (1.0 - 2.0 * logistic(a));
}

}  // namespace detail

double qos_satisfaction(double z, const ServiceClass& cls) {
  require_nonnegative(z, "resource amount");
  return detail::sigmoid(cls, z);
}

double qos_derivative(double z, const ServiceClass& cls) {
  require_nonnegative(z, "resource amount");
  return detail::sigmoid_d1(cls, z);
}

double qos_second_derivative(double z, const ServiceClass& cls) {
  require_nonnegative(z, "resource amount");
  return detail::sigmoid_d2(cls, z);
}

double price_satisfaction(double p, const ServiceClass& cls) {
  require_nonnegative(p, "price");
  return logistic(-cls.t_p * (p - cls.b));
}

double optimal_price(const ServiceClass& cls) {
  if (!(cls.t_p > 0.0)) {
    throw std::domain_error("service class '" + cls.id +
                            "': t_p = 0 leaves the revenue without a finite maximizer");
  }
  // Stationarity of p * s(p): p * t_p * (1 - s(p)) = 1, increasing in p.
  auto residual = [&](double p) {
    return 1.0 - p * cls.t_p * logistic(cls.t_p * (p - cls.b));
  };
  double hi = std::max(cls.b, 0.0) + 2.0 / cls.t_p;
  while (residual(hi) > 0.0) hi *= 2.0;
  const double tol = 1e-14 * std::max(1.0, hi);
  return bisect(residual, 0.0, hi, tol);
}

double pricing_weight(const ServiceClass& cls) {
  const double p = optimal_price(cls);
  return p * price_satisfaction(p, cls);
}

double expected_revenue(std::span<const Charge> charges,
                        std::span<const ServiceClass> classes) {
  if (charges.size() != classes.size()) {
    throw std::invalid_argument("expected_revenue: one class per charge required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < charges.size(); ++i) {
    const auto& [z, p] = charges[i];
    total += price_satisfaction(p, classes[i]) * qos_satisfaction(z, classes[i]) * p;
  }
  return total;
}

IntervalEnvelope interval_envelope(const ServiceClass& cls, double lo, double hi) {
  IntervalEnvelope env{lo, hi, lo, detail::sigmoid(cls, lo), 0.0};
  env.slope = detail::sigmoid_d1(cls, lo);
  if (cls.t_z <= 0.0 || lo >= cls.k || hi <= lo) return env;

  const double u_lo = env.value_lo;
  auto chord_to = [&](double end) {
    env.bp = end;
    env.slope = (detail::sigmoid(cls, end) - u_lo) / (end - lo);
  };
  if (hi <= cls.k) {
    chord_to(hi);
    return env;
  }
  // Tangency of the chord from lo: g(w) = u'(w)(w - lo) - (u(w) - u(lo)).
  auto g = [&](double w) {
    return detail::sigmoid_d1(cls, w) * (w - lo) - (detail::sigmoid(cls, w) - u_lo);
  };
  double left = cls.k;
  double right = std::isfinite(hi) ? hi : cls.k + 200.0 / cls.t_z;
  if (std::isfinite(hi)) {
    if (g(hi) >= 0.0) {
      chord_to(hi);
      return env;
    }
  } else {
    while (g(right) > 0.0) {
      left = right;
      right = cls.k + 2.0 * (right - cls.k);
    }
  }
  chord_to(bisect(g, left, right, kEnvelopeTol));
  return env;
}

EnvelopeValue interval_envelope_eval(const IntervalEnvelope& env,
                                     const ServiceClass& cls, double z) {
  if (z <= env.bp) {
    return {env.value_lo + env.slope * (z - env.lo), env.slope};
  }
  return {detail::sigmoid(cls, z), detail::sigmoid_d1(cls, z)};
}

Envelope build_envelope(const ServiceClass& cls) {
  Envelope env;
  env.u0 = detail::sigmoid(cls, 0.0);
  if (cls.k <= 0.0 || cls.t_z <= 0.0) {
    env.slope = detail::sigmoid_d1(cls, 0.0);
    return env;
  }
  const double u0 = env.u0;
  auto g = [&](double w) {
    return detail::sigmoid_d1(cls, w) * w - (detail::sigmoid(cls, w) - u0);
  };
  double left = cls.k + 1e-9;
  if (!(g(left) > 0.0)) {
    // t_z * k is too small for the convex branch to register numerically.
    env.fallback = true;
    env.w = cls.k;
    env.slope = (detail::sigmoid(cls, cls.k) - u0) / cls.k;
    return env;
  }
  double right = cls.k + 200.0 / cls.t_z;
  while (g(right) > 0.0) {
    left = right;
    right = cls.k + 2.0 * (right - cls.k);
  }
  env.w = bisect(g, left, right, kEnvelopeTol);
  env.slope = (detail::sigmoid(cls, env.w) - u0) / env.w;
  return env;
}

EnvelopeValue envelope_eval(const Envelope& env, const ServiceClass& cls, double z) {
  require_nonnegative(z, "resource amount");
  if (z < env.w) return {env.u0 + env.slope * z, env.slope};
  return {detail::sigmoid(cls, z), detail::sigmoid_d1(cls, z)};
}

Nonconcavity nonconcavity(const ServiceClass& cls) {
  return nonconcavity(cls, build_envelope(cls));
}

Nonconcavity nonconcavity(const ServiceClass& cls, const Envelope& env) {
  if (env.w <= 0.0) return {0.0, 0.0};
  auto gap = [&](double z) { return env.u0 + env.slope * z - detail::sigmoid(cls, z); };
  // The gap peaks on the convex branch where u'(z) equals the chord slope.
  Nonconcavity best{0.0, 0.0};
  const double top = std::min(cls.k, env.w);
  if (detail::sigmoid_d1(cls, 0.0) < env.slope && detail::sigmoid_d1(cls, top) > env.slope) {
    auto g = [&](double z) { return env.slope - detail::sigmoid_d1(cls, z); };
    const double z = bisect(g, 0.0, top, 1e-12 * std::max(1.0, top));
    best = {gap(z), z};
  }
  for (double z : {0.0, top, env.w}) {
    if (gap(z) > best.rho) best = {gap(z), z};
  }
  best.rho = std::max(best.rho, 0.0);
  return best;
}

double epsilon_bound(std::span<const WeightedClass> users, int num_nps) {
  if (num_nps < 1) throw std::invalid_argument("epsilon_bound: K must be at least 1");
  std::vector<double> rho;
  rho.reserve(users.size());
  for (const auto& u : users) rho.push_back(u.weight * nonconcavity(u.cls).rho);
  std::sort(rho.begin(), rho.end(), std::greater<>());
  const auto take = std::min<std::size_t>(rho.size(), static_cast<std::size_t>(num_nps));
  double eps = 0.0;
  for (std::size_t j = 0; j < take; ++j) eps += rho[j];
  return eps;
}

}  // namespace netslice
