#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "scaling_lens/degree.hpp"
#include "scaling_lens/errors.hpp"

using namespace scaling_lens;
using mp = boost::multiprecision::cpp_dec_float_50;

namespace {

constexpr GenFunction kAll[] = {GenFunction::kConceptNode, GenFunction::kTextNode,
                                GenFunction::kParentTextEdge,
                                GenFunction::kConceptEdge};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("generating functions are 1 at x = 1") {
  const DegreeModel models[] = {DegreeModel(20, 40, 3.0), DegreeModel(1000, 5000, 6.0),
                                DegreeModel(1000000000, 1000000000, 6.0),
                                DegreeModel(2, 2, 1.0, 0.3)};
  for (const DegreeModel& m : models) {
    for (GenFunction f : kAll) {
      CHECK(std::abs(m.eval(f, 1.0) - 1.0) <= 1e-12);
      CHECK(std::abs(m.with_mode(EvalMode::kPoissonLimit).eval(f, 1.0) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("lambda_T closed form with T = 2, p = 0.5") {
  const DegreeModel m(2, 2, 1.0);
  CHECK(m.edge_probability() == 0.5);
  CHECK(m.eval(GenFunction::kConceptEdge, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("huge T: exact_log against a 50-digit reference and the Poisson limit") {
  const std::uint64_t T = 1000000000;
  const DegreeModel m(T, T, 6.0);  // p = 6e-9, d_r = 6
  const double exact = m.eval(GenFunction::kConceptEdge, 0.0);
  const mp p = mp(6) / mp(T);
  const mp ref = exp(mp(T - 1) * log(mp(1) - p));
  CHECK(rel(exact, ref.convert_to<double>()) < 1e-12);
  CHECK(exact == doctest::Approx(2.4788e-3).epsilon(1e-4));
  const double pois = m.with_mode(EvalMode::kPoissonLimit).eval(GenFunction::kConceptEdge, 0.0);
  // The two differ by exp(-n p^2 / 2) to leading order.
  const double n = static_cast<double>(T - 1);
  const double bound = n * 6e-9 * 6e-9 / 2.0;
  CHECK(rel(pois, exact) <= bound * 1.001);
  CHECK(rel(pois, exact) < 2e-8);
}

TEST_CASE("l_prime_at_one") {
  CHECK(DegreeModel(100, 100, 6.0).l_prime_at_one() == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(DegreeModel(10, 10, 1.0).l_prime_at_one() == doctest::Approx(1.0).epsilon(1e-15));
  const DegreeModel m(10000, 10000, 6.0);
  CHECK(rel(m.eval(GenFunction::kConceptNode, 1.0, 1), l_prime_at_one(m)) < 1e-9);
}

TEST_CASE("edge perspective equals normalised node derivative") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  for (std::uint64_t T : {1ULL, 2ULL, 17ULL, 300ULL, 10000ULL}) {
    const DegreeModel m(50, T, 4.0);
    for (int i = 0; i < 20; ++i) {
      const double x = ux(rng);
      const double lhs = m.eval(GenFunction::kConceptEdge, x);
      const double rhs = m.eval(GenFunction::kConceptNode, x, 1) / m.l_prime_at_one();
      if (lhs > 1e-250) CHECK(rel(lhs, rhs) < 1e-9);
    }
  }
}

TEST_CASE("exact_log and poisson_limit agree to O(d^2 / n)") {
  for (double n_concepts : {1e6, 1e7, 1e9}) {
    for (double d : {1.0, 6.0, 20.0}) {
      const auto R = static_cast<std::uint64_t>(n_concepts);
      const DegreeModel m(R, R, d);
      const DegreeModel pm = m.with_mode(EvalMode::kPoissonLimit);
      for (double x : {0.0, 0.25, 0.5, 0.75}) {
        for (GenFunction f : kAll) {
          const double n = m.exponent(f);
          const double mean = n * m.edge_probability();
          const double s = 1.0 - x;
          const double bound = mean * mean * s * s / (2.0 * n);
          const double a = m.eval(f, x), b = pm.eval(f, x);
          if (a < 1e-300) continue;
          CHECK(rel(b, a) <= bound * 1.01 + 1e-13);
          if (bound < 5e-7) CHECK(rel(b, a) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("monotone and bounded on [0, 1]") {
  const DegreeModel m(300, 900, 5.0, 0.4);
  for (GenFunction f : kAll) {
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
      const double v = m.eval(f, i / 400.0);
      CHECK(v >= prev);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("analytic derivatives match central differences") {
  const DegreeModel m(40, 90, 3.0);
  const double h = 1e-5;
  for (GenFunction f : kAll) {
    for (double x : {0.2, 0.5, 0.8}) {
      const double d1 = (m.eval(f, x + h) - m.eval(f, x - h)) / (2 * h);
      const double d2 = (m.eval(f, x + h) - 2 * m.eval(f, x) + m.eval(f, x - h)) / (h * h);
      CHECK(rel(m.eval(f, x, 1), d1) < 1e-6);
      CHECK(rel(m.eval(f, x, 2), d2) < 1e-3);
    }
  }
}

TEST_CASE("deficit form matches direct evaluation") {
  const DegreeModel m(500, 700, 6.0);
  for (GenFunction f : kAll) {
    for (double s : {1e-9, 1e-4, 0.3, 1.0}) {
      CHECK(m.eval_deficit(f, s) == doctest::Approx(m.eval(f, 1.0 - s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("validation and domain errors") {
  CHECK_THROWS_AS(DegreeModel(0, 10, 1.0), ValidationError);
  CHECK_THROWS_AS(DegreeModel(10, 0, 1.0), ValidationError);
  CHECK_THROWS_AS(DegreeModel(10, 10, 10.0), ValidationError);
  CHECK_THROWS_AS(DegreeModel(10, 10, -1.0), ValidationError);
  CHECK_THROWS_AS(DegreeModel(10, 10, 1.0, 1.0), ValidationError);
  const DegreeModel m(10, 10, 1.0);
  CHECK_THROWS_AS(m.eval(GenFunction::kTextNode, 1.5), DomainError);
  CHECK_THROWS_AS(m.eval(GenFunction::kTextNode, -0.1), DomainError);
  // Deep underflow returns exactly zero.
  const DegreeModel big(1000000, 1000000000000ULL, 6.0);
  CHECK(big.eval(GenFunction::kConceptEdge, 0.0) == 0.0);
}
