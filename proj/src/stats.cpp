// Copyright (C) 2026 The rankfuse Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.

#include "rankfuse/stats.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace rankfuse {

namespace {

// Continued fraction for I_x(a, b), evaluated with the modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 1000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete beta needs positive shape parameters");
  if (x < 0.0 || x > 1.0 || std::isnan(x)) throw Error("incomplete beta argument outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fast for x < (a + 1) / (a + b + 2); use the symmetry otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error("degrees of freedom must be positive");
  if (std::isnan(t)) throw Error("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestReport paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("paired t-test needs samples of equal size");
  const std::size_t n = a.size();
  if (n < 2) throw Error("paired t-test needs at least two pairs, got " + std::to_string(n));

  std::vector<double> diff(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    sum += diff[i];
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestReport r;
  r.n_pairs = n;
  r.mean_difference = mean;
  if (sd == 0.0) {
    r.degenerate = true;
    if (mean == 0.0) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.p_value = 0.0;
    }
    return r;
  }
  r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p_value = student_t_two_sided_p(r.t_statistic, static_cast<double>(n - 1));
  return r;
}

TTestReport paired_t_test(const std::map<TopicNumber, double>& a, const std::map<TopicNumber, double>& b) {
  std::string only_a;
  std::string only_b;
  for (const auto& [t, _] : a)
    if (!b.count(t)) only_a += (only_a.empty() ? "" : ",") + std::to_string(t);
  for (const auto& [t, _] : b)
    if (!a.count(t)) only_b += (only_b.empty() ? "" : ",") + std::to_string(t);
  if (!only_a.empty() || !only_b.empty())
    throw Error("paired t-test topic sets differ; only in first: [" + only_a + "], only in second: [" + only_b + "]");

  std::vector<double> va;
  std::vector<double> vb;
  for (const auto& [t, v] : a) {
    va.push_back(v);
    vb.push_back(b.at(t));
  }
  return paired_t_test(va, vb);
}

}  // namespace rankfuse
