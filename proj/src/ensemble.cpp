#include "scaling_lens/ensemble.hpp"

#include <cmath>
#include <numeric>

#include "scaling_lens/errors.hpp"

namespace scaling_lens {
namespace {

// Horner evaluation of the order-th derivative of sum coeffs[i] x^i.
double polynomial(const std::vector<double>& coeffs, double x, int order) {
  double value = 0.0;
  for (std::size_t k = coeffs.size(); k-- > static_cast<std::size_t>(order);) {
    double c = coeffs[k];
    for (int j = 0; j < order; ++j) c *= static_cast<double>(k - j);
    value = value * x + c;
  }
  return value;
}

void check_distribution(const std::vector<double>& coeffs, const char* name) {
  if (coeffs.empty()) {
    throw ValidationError(std::string("PolynomialEnsemble: empty ") + name);
  }
  double total = 0.0;
  for (double c : coeffs) {
    if (!(c >= 0.0)) {
      throw ValidationError(std::string("PolynomialEnsemble: negative ") +
                            name + " coefficient");
    }
    total += c;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError(std::string("PolynomialEnsemble: ") + name +
                          " coefficients must sum to 1");
  }
}

}  // namespace

double ErasureEnsemble::log_lambda_deficit(double s) const {
  return std::log(lambda_deficit(s, 0));
}

double BinomialEnsemble::lambda_deficit(double s, int order) const {
  return model_.eval_deficit(GenFunction::kConceptEdge, s, order);
}

double BinomialEnsemble::rho_deficit(double s, int order) const {
  return model_.eval_deficit(GenFunction::kParentTextEdge, s, order);
}

double BinomialEnsemble::node_deficit(double s) const {
  return model_.eval_deficit(GenFunction::kConceptNode, s, 0);
}

double BinomialEnsemble::l_prime_at_one() const {
  return model_.l_prime_at_one();
}

double BinomialEnsemble::log_lambda_deficit(double s) const {
  return model_.log_eval_deficit(GenFunction::kConceptEdge, s);
}

PolynomialEnsemble::PolynomialEnsemble(std::vector<double> lambda_coeffs,
                                       std::vector<double> rho_coeffs)
    : lambda_(std::move(lambda_coeffs)), rho_(std::move(rho_coeffs)) {
  check_distribution(lambda_, "lambda");
  check_distribution(rho_, "rho");
  lambda_integral_ = 0.0;
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    lambda_integral_ += lambda_[i] / static_cast<double>(i + 1);
  }
}

PolynomialEnsemble PolynomialEnsemble::regular(int variable_degree,
                                               int check_degree) {
  if (variable_degree < 1 || check_degree < 1) {
    throw ValidationError("PolynomialEnsemble::regular: degrees must be >= 1");
  }
  std::vector<double> lambda(variable_degree, 0.0);
  std::vector<double> rho(check_degree, 0.0);
  lambda.back() = 1.0;
  rho.back() = 1.0;
  return PolynomialEnsemble(std::move(lambda), std::move(rho));
}

double PolynomialEnsemble::lambda_deficit(double s, int order) const {
  return polynomial(lambda_, 1.0 - s, order);
}

double PolynomialEnsemble::rho_deficit(double s, int order) const {
  return polynomial(rho_, 1.0 - s, order);
}

double PolynomialEnsemble::node_deficit(double s) const {
  // L(x) = int_0^x lambda / int_0^1 lambda.
  const double x = 1.0 - s;
  double value = 0.0;
  for (std::size_t k = lambda_.size(); k-- > 0;) {
    value = value * x + lambda_[k] / static_cast<double>(k + 1);
  }
  return value * x / lambda_integral_;
}

double PolynomialEnsemble::l_prime_at_one() const {
  return 1.0 / lambda_integral_;
}

}  // namespace scaling_lens
