#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "scaling_lens/emergence.hpp"
#include "scaling_lens/errors.hpp"

using namespace scaling_lens;

namespace {

// Pr{Binomial(n, p) >= k} for integer k >= 1.
double binomial_tail(double n, double p, double k) {
  if (k > n) return 0.0;
  return boost::math::ibeta(k, n - k + 1.0, p);
}

double bisect_gcc(double c) {
  double lo = 1e-3, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - (1.0 - std::exp(-c * mid)) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("concept_pair_prob closed cases") {
  CHECK(concept_pair_prob(100, 0, 6.0, 10) == 0.0);
  CHECK(concept_pair_prob(10, 3, 10.0, 4) == doctest::Approx(1.0 / 16.0));
  const double want = (1.0 - std::pow(1.0 - 0.04, 5)) / 16.0;
  CHECK(concept_pair_prob(10, 5, 2.0, 4) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("concept_pair_prob against sampling") {
  std::mt19937_64 rng(2718);
  std::bernoulli_distribution in_text(0.2);
  std::uniform_int_distribution<int> skill(0, 3);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    bool share = false;
    for (int t = 0; t < 5; ++t) {
      const bool a = in_text(rng), b = in_text(rng);
      share = share || (a && b);
    }
    const bool sa = skill(rng) == 0, sb = skill(rng) == 0;
    if (share && sa && sb) ++hits;
  }
  const double mean = static_cast<double>(hits) / n;
  const double se = std::sqrt(mean * (1 - mean) / n);
  CHECK(std::abs(concept_pair_prob(10, 5, 2.0, 4) - mean) < 3 * se);
}

TEST_CASE("skill_link_prob cases") {
  CHECK(skill_link_prob(200, 1e-3, 5.0, 2.0, 0.0) == 0.0);
  // eta = 1 far below the mean of about 100
  const double deep = skill_link_prob(1000, 100.0 / 499500.0, 1.0, 0.0, 1.0);
  CHECK(deep > 0.999);
  CHECK(skill_link_prob(1000, 100.0 / 499500.0, 1.0, 1.0, 0.9) ==
        doctest::Approx(deep * 0.81).epsilon(1e-12));
  // upper branch against the exact tail
  const double bound = skill_link_prob(200, 1e-3, 30.0, 0.0, 1.0);
  const double tail = binomial_tail(19900, 1e-3, 30);
  MESSAGE("bound " << bound << " tail " << tail);
  CHECK(bound <= tail);
  CHECK(bound >= 0.1 * tail);
  // degenerate threshold
  CHECK(link_bound_degenerate(10, 45.0));
  CHECK_FALSE(link_bound_degenerate(10, 44.5));
  CHECK(skill_link_prob(10, 0.5, 45.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("skill_link_prob is a sound lower bound") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> ur(20, 447);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t R = ur(rng);
    const double pairs = 0.5 * R * (R - 1);
    const double mu = 1.0 + 99.0 * u01(rng);
    const double p = mu / pairs;
    const double eta = std::max(1.0, std::floor(3.0 * mu * u01(rng)));
    const double bound = skill_link_prob(R, p, eta, 0.0, 1.0);
    const double tail = binomial_tail(pairs, p, eta);
    CHECK(bound >= 0.0);
    CHECK(bound <= tail + 1e-12);
  }
}

TEST_CASE("skill_link_prob monotonicity") {
  const std::uint64_t R = 2000;
  for (double eta : {2.0, 7.5, 40.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 60; ++i) {
      const double p = 1e-8 * std::pow(10.0, i / 15.0);
      const double v = skill_link_prob(R, p, eta, 1.5, 0.8);
      CHECK(v >= prev);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
  const double p = 1e-5;
  double prev = 2.0;
  for (int i = 0; i <= 80; ++i) {
    const double eta = 0.5 + i * 0.5;
    const double v = skill_link_prob(R, p, eta, 0.0, 1.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("lambert_w0") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const double z = -2.0 * std::exp(-2.0);
  const double w = lambert_w0(z);
  CHECK(w == doctest::Approx(-0.406375739).epsilon(1e-9));
  CHECK(std::abs(w * std::exp(w) - z) < 1e-12);
  CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
  const double lo = std::log10(1e-9), hi = std::log10(1e6 + std::exp(-1.0));
  for (int i = 0; i < 10000; ++i) {
    const double zz = -std::exp(-1.0) + std::pow(10.0, lo + (hi - lo) * i / 9999.0);
    const double ww = lambert_w0(zz);
    CHECK(std::abs(ww * std::exp(ww) - zz) < 1e-12 * std::max(1.0, std::abs(zz)));
  }
}

TEST_CASE("gcc_fraction") {
  for (int i = 0; i <= 1000; ++i) CHECK(gcc_fraction(i / 1000.0) == 0.0);
  CHECK(gcc_fraction(2.0) == doctest::Approx(bisect_gcc(2.0)).epsilon(1e-10));
  CHECK(std::abs(gcc_fraction(2.0) - 0.796812) < 1e-3);
  CHECK(std::abs(gcc_fraction(50.0) - 1.0) < 1e-15);
  double prev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double c = 1.0 + 99.0 * i / 1000.0;
    const double g = gcc_fraction(c);
    CHECK(std::abs(g - (1.0 - std::exp(-c * g))) < 1e-10);
    if (prev < 1.0 - 1e-12) CHECK(g > prev); else CHECK(g >= prev);
    prev = g;
  }
  CHECK(gcc_fraction(1.0 + 1e-6) < 1e-5);
  CHECK(gcc_fraction(1.0 + 1e-6) > 0.0);
}

TEST_CASE("level recursion") {
  SkillHierarchy h;
  h.S = {1000, 1000, 1000};
  h.eta = {2.0, 2.0, 2.0};
  h.sigma = {0.0, 1.0, 1.0};
  h.validate();
  // Starved budget: level 1 has no giant component and nothing above does.
  const auto starved = level_recursion(h, 2000, 10, 6.0);
  CHECK(starved[0].gamma == 0.0);
  CHECK(starved[1].gamma == 0.0);
  CHECK(starved[2].gamma == 0.0);

  const SkillHierarchy fig = SkillHierarchy::exponential(100, 1000);
  CHECK(fig.sigma[0] == 0.0);
  CHECK(fig.eta[99] == doctest::Approx(std::exp(7.0)));
  BudgetSpec s;
  s.C = 6e18;
  const OptimumPoint opt = optimize_budget(s);
  const auto big = level_gammas(level_recursion(fig, opt.R_star, opt.T_star, 6.0));
  for (std::size_t l = 0; l < 50; ++l) CHECK(big[l] > 0.99);

  std::vector<double> prev(100, 0.0);
  for (std::uint64_t T : {1000000ULL, 3000000ULL, 10000000ULL, 30000000ULL, 100000000ULL}) {
    const auto g = level_gammas(level_recursion(fig, 100000, T, 6.0));
    for (std::size_t l = 0; l < g.size(); ++l) CHECK(g[l] >= prev[l] - 1e-9);
    prev = g;
  }
}

TEST_CASE("hierarchy validation") {
  SkillHierarchy h;
  h.S = {1};
  h.eta = {1.0};
  h.sigma = {0.0};
  CHECK_THROWS_AS(h.validate(), ValidationError);
  h.S = {10, 10};
  h.eta = {1.0, 1.0};
  h.sigma = {1.0, 0.0};
  CHECK_THROWS_AS(h.validate(), ValidationError);
}

TEST_CASE("task accuracy") {
  const std::vector<double> ones(3, 1.0);
  CHECK(task_accuracy(ones, TaskSpec::homogeneous(2, 4)) == 1.0);
  const std::vector<double> g{0.3, 0.9};
  CHECK(task_accuracy(g, TaskSpec::homogeneous(2, 3)) == doctest::Approx(0.729).epsilon(1e-15));
  const std::vector<double> half{0.5};
  const std::vector<double> level{1.0};
  const TaskSpec t = TaskSpec::product(level, uniform_arity(2, 7));
  CHECK(task_accuracy(half, t) == doctest::Approx(0.08203125).epsilon(1e-15));
  // monotone in each coordinate
  const std::vector<double> q = task_mixture_binomial(4, 0.5);
  const TaskSpec mix = TaskSpec::product(q, uniform_arity(1, 3));
  std::vector<double> gam{0.2, 0.4, 0.6, 0.8};
  double base = task_accuracy(gam, mix);
  for (std::size_t l = 0; l < 4; ++l) {
    auto up = gam;
    up[l] += 0.1;
    CHECK(task_accuracy(up, mix) >= base);
  }
  TaskSpec bad;
  bad.terms = {{1, 2, 0.5}};
  CHECK_THROWS_AS(bad.validate(2), ValidationError);
}

TEST_CASE("binomial level mixtures") {
  const auto q = task_mixture_binomial(2, 0.5);
  REQUIRE(q.size() == 2);
  CHECK(q[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(q[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const std::vector<double> w{0.4, 0.4, 0.2}, pi{0.2, 0.6, 0.95};
  const auto tri = task_mixture_binomial(100, w, pi);
  CHECK(std::abs(std::accumulate(tri.begin(), tri.end(), 0.0) - 1.0) < 1e-12);
  std::vector<std::size_t> modes;
  for (std::size_t i = 0; i < tri.size(); ++i) {
    const bool left = i == 0 || tri[i] > tri[i - 1];
    const bool right = i + 1 == tri.size() || tri[i] >= tri[i + 1];
    if (left && right) modes.push_back(i + 1);
  }
  REQUIRE(modes.size() == 3);
  CHECK(std::abs(static_cast<int>(modes[0]) - 20) <= 2);
  CHECK(std::abs(static_cast<int>(modes[1]) - 60) <= 2);
  CHECK(std::abs(static_cast<int>(modes[2]) - 95) <= 2);
  const auto uni = task_mixture_binomial(100, 0.5);
  CHECK(std::abs(std::accumulate(uni.begin(), uni.end(), 0.0) - 1.0) < 1e-12);
}

TEST_CASE("detect_plateaus") {
  std::vector<double> x, flat, step;
  for (int i = 0; i < 30; ++i) {
    x.push_back(i * 0.1);
    flat.push_back(0.3);
    step.push_back(i < 12 ? 0.0 : (i < 16 ? (i - 11) * 0.25 : 1.0));
  }
  const auto one = detect_plateaus(x, flat, 0.02, 0.3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].kind == SegmentKind::kPlateau);
  const auto three = detect_plateaus(x, step, 0.02, 0.3);
  REQUIRE(three.size() == 3);
  CHECK(three[0].kind == SegmentKind::kPlateau);
  CHECK(three[1].kind == SegmentKind::kRise);
  CHECK(three[2].kind == SegmentKind::kPlateau);
  CHECK(interior_plateaus(three) == 0);
  CHECK(rise_count(three) == 1);
  const std::vector<double> few(7, 0.0);
  CHECK_THROWS_AS(detect_plateaus(few, few, 0.02, 0.3), InsufficientPoints);
}
