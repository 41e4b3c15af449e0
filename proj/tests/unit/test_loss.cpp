#include <doctest.h>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "scaling_lens/errors.hpp"
#include "scaling_lens/loss.hpp"

using namespace scaling_lens;
using mp50 = boost::multiprecision::cpp_bin_float_50;

namespace {

// Sum over the number k of concepts in a text of Pr{degree k} times
// Pr{at least two of them unlearned}.
double k_sum_oracle(unsigned R, double d_t, double P_b) {
  const mp50 p = mp50(d_t) / R;
  const mp50 q = P_b;
  mp50 total = 0;
  for (unsigned k = 2; k <= R; ++k) {
    const mp50 binom = boost::math::binomial_coefficient<double>(R, k);
    const mp50 degree = binom * pow(p, k) * pow(1 - p, R - k);
    const mp50 two_plus = 1 - pow(1 - q, k) - k * q * pow(1 - q, k - 1);
    total += degree * two_plus;
  }
  return static_cast<double>(total);
}

}  // namespace

TEST_CASE("training error trivial values") {
  CHECK(training_error_exact(100, 6.0, 0.0) == 0.0);
  CHECK(training_error_exact(1, 0.5, 0.7) == 0.0);
  CHECK(training_error_exact(1000000, 1000000.0, 1.0) == doctest::Approx(1.0));
  CHECK(training_error_exact(10000, 10000.0, 1.0) > 0.999);
  CHECK(training_error_approx(6.0, 0.0, 0.5) == 0.0);
  CHECK(excess_entropy_lb(0.0) == 0.0);
  CHECK(excess_entropy_lb(1.0) == 0.5);
}

TEST_CASE("closed form matches the k-sum") {
  CHECK(training_error_exact(50, 4.0, 0.1) ==
        doctest::Approx(k_sum_oracle(50, 4.0, 0.1)).epsilon(1e-10));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<unsigned> ur(2, 200);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const unsigned R = ur(rng);
    const double d_t = 0.5 + u01(rng) * (R - 0.5);
    const double P_b = u01(rng);
    const double got = training_error_exact(R, d_t, P_b);
    const double want = k_sum_oracle(R, d_t, P_b);
    CHECK(std::abs(got - want) <= 1e-10);
  }
}

TEST_CASE("quadratic approximation") {
  CHECK(training_error_approx(6.0, 1e-3, 0.5) == doctest::Approx(5.76e-4).epsilon(1e-14));
  for (double pb : {1e-3, 1e-4, 1e-6}) {
    for (std::uint64_t R : {10000ULL, 1000000ULL}) {
      const double exact = training_error_exact(R, 6.0, pb);
      const double series = 0.5 * 36.0 * pb * pb;
      CHECK(std::abs(exact / series - 1.0) < 0.1);
    }
  }
}

TEST_CASE("training error is monotone in P_b and d_t") {
  for (std::uint64_t R : {5ULL, 50ULL, 5000ULL}) {
    double prev_pb = -1.0;
    for (int i = 0; i <= 40; ++i) {
      const double v = training_error_exact(R, 4.0, i / 40.0);
      CHECK(v >= prev_pb);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev_pb = v;
    }
    double prev_d = -1.0;
    for (int i = 0; i <= 40; ++i) {
      const double v = training_error_exact(R, 0.1 + (R - 0.1) * i / 40.0, 0.3);
      CHECK(v >= prev_d);
      prev_d = v;
    }
  }
  for (int i = 0; i <= 10; ++i) CHECK(excess_entropy_lb(i / 10.0) <= 0.5);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(training_error_exact(10, 6.0, 1.5), DomainError);
  CHECK_THROWS_AS(training_error_exact(10, 20.0, 1.0), DomainError);
  CHECK_THROWS_AS(training_error_exact(10, -1.0, 0.5), DomainError);
  CHECK_THROWS_AS(training_error_exact(0, 1.0, 0.5), DomainError);
}

TEST_CASE("frontier loss curve") {
  CHECK(frontier_loss_curve(std::span<const BudgetSpec>{}).empty());
  const auto specs = budget_sweep(BudgetSpec{}, 6e4, 6e7, 10);
  const auto curve = frontier_loss_curve(specs);
  REQUIRE(curve.size() == specs.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].excess_entropy_lb == 0.5 * curve[i].P_e_train_exact * curve[i].P_e_train_exact);
    if (i > 0) {
      CHECK(curve[i].N_star >= curve[i - 1].N_star);
      CHECK(curve[i].excess_entropy_lb <= curve[i - 1].excess_entropy_lb + 1e-12);
    }
  }
  std::vector<double> x, y;
  for (const auto& p : curve) {
    if (p.excess_entropy_lb > 0.0) {
      x.push_back(std::log10(p.N_star));
      y.push_back(std::log10(p.excess_entropy_lb));
    }
  }
  REQUIRE(x.size() >= 5);
  const LineFit fit = fit_line(x, y);
  MESSAGE("loss slope " << fit.slope);
  CHECK(fit.slope < -0.3);
}
