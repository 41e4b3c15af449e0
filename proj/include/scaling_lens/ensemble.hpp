#pragma once

#include <vector>

#include "scaling_lens/degree.hpp"

namespace scaling_lens {

/// Edge-perspective degree distributions (lambda for concepts/variables, rho
/// for texts/checks) consumed by the density-evolution solver. Evaluation is
/// parameterised by the deficit s = 1 - x so that points close to x = 1 keep
/// full precision.
class ErasureEnsemble {
 public:
  virtual ~ErasureEnsemble() = default;

  virtual double lambda_deficit(double s, int order = 0) const = 0;
  virtual double rho_deficit(double s, int order = 0) const = 0;
  /// Node-perspective concept distribution L(1 - s).
  virtual double node_deficit(double s) const = 0;
  virtual double l_prime_at_one() const = 0;

  virtual double log_lambda_deficit(double s) const;

  double lambda(double x, int order = 0) const {
    return lambda_deficit(1.0 - x, order);
  }
  double rho(double x, int order = 0) const {
    return rho_deficit(1.0 - x, order);
  }
};

/// lambda_T and rho~_R of a DegreeModel.
class BinomialEnsemble final : public ErasureEnsemble {
 public:
  explicit BinomialEnsemble(const DegreeModel& model) : model_(model) {}

  double lambda_deficit(double s, int order = 0) const override;
  double rho_deficit(double s, int order = 0) const override;
  double node_deficit(double s) const override;
  double l_prime_at_one() const override;
  double log_lambda_deficit(double s) const override;

  const DegreeModel& model() const { return model_; }

 private:
  DegreeModel model_;
};

/// Arbitrary polynomial pair, e.g. lambda(x) = x^2, rho(x) = x^5 for the
/// (3,6)-regular ensemble. coeffs[i] multiplies x^i; each list must have
/// nonnegative entries summing to 1.
class PolynomialEnsemble final : public ErasureEnsemble {
 public:
  PolynomialEnsemble(std::vector<double> lambda_coeffs,
                     std::vector<double> rho_coeffs);

  static PolynomialEnsemble regular(int variable_degree, int check_degree);

  double lambda_deficit(double s, int order = 0) const override;
  double rho_deficit(double s, int order = 0) const override;
  double node_deficit(double s) const override;
  double l_prime_at_one() const override;

  const std::vector<double>& lambda_coeffs() const { return lambda_; }
  const std::vector<double>& rho_coeffs() const { return rho_; }

 private:
  std::vector<double> lambda_;
  std::vector<double> rho_;
  double lambda_integral_;
};

}  // namespace scaling_lens
