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

#pragma once

#include <span>
#include <string>
#include <vector>

namespace netslice {

// Private parameters of a service class. t_z and k shape the QoS curve,
// t_p and b the price-acceptance curve.
struct ServiceClass {
  std::string id;
  double t_z = 0.0;  // QoS sensitivity, per resource unit
  double k = 0.0;    // QoS prerequisite, resource units
  double t_p = 0.0;  // price sensitivity, per monetary unit
  double b = 0.0;    // budget, monetary units

  void validate() const;
  bool operator==(const ServiceClass&) const = default;
};

struct UserSpec {
  std::string id;
  std::string class_id;
  std::vector<double> beta;  // connectivity per NP, each in (0, 1]
  double weight = 1.0;       // utility coefficient

  bool operator==(const UserSpec&) const = default;
};

// Concave envelope of a sigmoid on [0, inf): chord from 0 to w, then u.
struct Envelope {
  double w = 0.0;
  double u0 = 0.0;
  double slope = 0.0;
  bool fallback = false;  // bisection bracket failed; w = k was used
};

// Concave majorant of u restricted to [lo, hi]: the chord from lo to bp,
// followed by u itself on [bp, hi]. bp == lo means u is already concave there.
struct IntervalEnvelope {
  double lo = 0.0;
  double hi = 0.0;
  double bp = 0.0;
  double value_lo = 0.0;
  double slope = 0.0;
};

struct EnvelopeValue {
  double value;
  double derivative;
};

struct Nonconcavity {
  double rho;
  double at;  // location of the largest gap
};

struct Charge {
  double z;
  double p;
};

struct WeightedClass {
  double weight;
  ServiceClass cls;
};

/// Numerically stable 1 / (1 + exp(-x)).
double logistic(double x);
/// Stable log(logistic(x)).
double log_logistic(double x);

namespace detail {
// Unchecked sigmoid kernels used on solver hot paths; z may carry rounding
// noise slightly below zero.
double sigmoid(const ServiceClass& cls, double z);
double sigmoid_d1(const ServiceClass& cls, double z);
double sigmoid_d2(const ServiceClass& cls, double z);
}  // namespace detail

double qos_satisfaction(double z, const ServiceClass& cls);
double qos_derivative(double z, const ServiceClass& cls);
double qos_second_derivative(double z, const ServiceClass& cls);

double price_satisfaction(double p, const ServiceClass& cls);

/// The revenue-maximizing price p * price_satisfaction(p). Throws
/// std::domain_error when t_p == 0 (no finite maximizer).
double optimal_price(const ServiceClass& cls);

/// optimal_price(cls) * price_satisfaction(optimal_price(cls)): the coefficient
/// that turns the QoS probability into expected revenue.
double pricing_weight(const ServiceClass& cls);

/// Sum over users of price_satisfaction(p_i) * qos_satisfaction(z_i) * p_i.
/// classes[i] is the class of user i.
double expected_revenue(std::span<const Charge> charges,
                        std::span<const ServiceClass> classes);

Envelope build_envelope(const ServiceClass& cls);
EnvelopeValue envelope_eval(const Envelope& env, const ServiceClass& cls, double z);

IntervalEnvelope interval_envelope(const ServiceClass& cls, double lo, double hi);
EnvelopeValue interval_envelope_eval(const IntervalEnvelope& env,
                                     const ServiceClass& cls, double z);

Nonconcavity nonconcavity(const ServiceClass& cls);
Nonconcavity nonconcavity(const ServiceClass& cls, const Envelope& env);

/// Sum of the K largest weighted nonconcavities (all of them when there are
/// fewer than K users).
double epsilon_bound(std::span<const WeightedClass> users, int num_nps);

}  // namespace netslice
