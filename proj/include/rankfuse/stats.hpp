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

#pragma once

#include <cstddef>
#include <map>
#include <span>

#include "rankfuse/types.hpp"

namespace rankfuse {

struct TTestReport {
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_pairs = 0;
  /// The differences have zero spread. t is 0 (p = 1) when they are all
  /// zero and +/-inf (p = 0) otherwise.
  bool degenerate = false;
  double mean_difference = 0.0;
};

/// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz),
/// absolute accuracy around 1e-12 for moderate a, b.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Two-sided paired t-test on a - b with n - 1 degrees of freedom.
TTestReport paired_t_test(std::span<const double> a, std::span<const double> b);

/// Pairs values by topic; the key sets must match exactly.
TTestReport paired_t_test(const std::map<TopicNumber, double>& a, const std::map<TopicNumber, double>& b);

}  // namespace rankfuse
