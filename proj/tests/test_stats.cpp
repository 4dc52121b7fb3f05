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


#include <catch_amalgamated.hpp>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "rankfuse/stats.hpp"

using namespace rankfuse;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("zero mean difference", "[stats][ttest]") {
  auto r = paired_t_test(std::vector<double>{0, 1, 0, -1}, std::vector<double>{0, 0, 0, 0});
  CHECK(r.t_statistic == 0.0);
  CHECK(std::abs(r.p_value - 1.0) <= 1e-9);
  CHECK(r.n_pairs == 4);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("degenerate samples", "[stats][ttest]") {
  std::vector<double> a{0.3, 0.5, 0.9};
  auto same = paired_t_test(a, a);
  CHECK(same.degenerate);
  CHECK(same.t_statistic == 0.0);
  CHECK(same.p_value == 1.0);

  std::vector<double> b{0.2, 0.4, 0.8};
  auto shift = paired_t_test(a, b);
  CHECK(shift.degenerate);
  CHECK(std::isinf(shift.t_statistic));
  CHECK(shift.t_statistic > 0);
  CHECK(shift.p_value == 0.0);

  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), Error);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1, 2}, std::vector<double>{2}), Error);
}

TEST_CASE("textbook paired data", "[stats][ttest]") {
  // Student's sleep data: extra hours of sleep under two drugs, ten patients.
  // Published: t = -4.0621, df = 9, p = 0.002833.
  std::vector<double> g1{0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0};
  std::vector<double> g2{1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4};
  auto r = paired_t_test(g1, g2);
  CHECK(std::abs(r.t_statistic - (-4.0621)) < 1e-3);
  CHECK(std::abs(r.p_value - 0.002833) < 1e-6);
  CHECK(r.mean_difference == Catch::Approx(-1.58));
}

TEST_CASE("p values agree with Boost.Math", "[stats][distribution]") {
  for (double df : {1.0, 2.0, 4.0, 9.0, 29.0, 49.0, 200.0})
    for (double t : {0.0, 0.1, 0.5, 1.0, 1.96, 2.5, 4.0, 8.0, 30.0}) {
      boost::math::students_t dist(df);
      const double want = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      CHECK(std::abs(student_t_two_sided_p(t, df) - want) <= 1e-10);
      CHECK(student_t_two_sided_p(-t, df) == student_t_two_sided_p(t, df));
    }
  for (double a : {0.5, 1.0, 2.5, 10.0})
    for (double b : {0.5, 3.0, 20.0})
      for (double x : {0.0, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0})
        CHECK(std::abs(regularized_incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)) <= 1e-12);
  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), Error);
  CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), Error);
}

TEST_CASE("antisymmetry", "[stats][ttest]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> n(2, 50);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(static_cast<std::size_t>(n(rng))), b(a.size());
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    auto ab = paired_t_test(a, b);
    auto ba = paired_t_test(b, a);
    CHECK(ab.t_statistic == -ba.t_statistic);
    CHECK(ab.p_value == ba.p_value);
    CHECK(ab.p_value >= 0.0);
    CHECK(ab.p_value <= 1.0);
  }
}

TEST_CASE("pairing by topic", "[stats][ttest]") {
  std::map<TopicNumber, double> a{{1, 0.5}, {2, 0.7}, {3, 0.1}};
  std::map<TopicNumber, double> b{{3, 0.2}, {1, 0.4}, {2, 0.6}};
  auto r = paired_t_test(a, b);
  CHECK(r.n_pairs == 3);
  CHECK(r.mean_difference == Catch::Approx(0.1 / 3.0));
  std::map<TopicNumber, double> c{{1, 0.5}, {2, 0.7}, {4, 0.1}};
  try {
    paired_t_test(a, c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK_THAT(e.what(), ContainsSubstring("[3]"));
    CHECK_THAT(e.what(), ContainsSubstring("[4]"));
  }
}
