#include "scaling_lens/degree.hpp"

#include <cmath>
#include <string>

#include "scaling_lens/errors.hpp"

namespace scaling_lens {
namespace {

// exp(x) underflows to zero below this.
constexpr double kLogUnderflow = -745.0;

}  // namespace

std::string_view to_string(GenFunction which) {
  switch (which) {
    case GenFunction::kConceptNode:
      return "L_T";
    case GenFunction::kTextNode:
      return "P_R";
    case GenFunction::kParentTextEdge:
      return "rho_tilde_R";
    case GenFunction::kConceptEdge:
      return "lambda_T";
  }
  return "?";
}

DegreeModel::DegreeModel(std::uint64_t concepts, std::uint64_t texts,
                         double text_degree, double epsilon, EvalMode mode)
    : concepts_(concepts),
      texts_(texts),
      text_degree_(text_degree),
      epsilon_(epsilon),
      p_(0.0),
      mode_(mode) {
  if (concepts == 0 || texts == 0) {
    throw ValidationError("DegreeModel: R and T must be positive");
  }
  if (!(text_degree > 0.0) || !std::isfinite(text_degree)) {
    throw ValidationError("DegreeModel: d_t must be positive, got " +
                          std::to_string(text_degree));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("DegreeModel: epsilon must lie in (0,1), got " +
                          std::to_string(epsilon));
  }
  p_ = text_degree / static_cast<double>(concepts);
  if (!(p_ < 1.0)) {
    throw ValidationError("DegreeModel: need d_t < R so that p < 1 (d_t=" +
                          std::to_string(text_degree) +
                          ", R=" + std::to_string(concepts) + ")");
  }
}

double DegreeModel::concept_degree() const {
  return p_ * static_cast<double>(texts_);
}

double DegreeModel::parent_concepts() const {
  return static_cast<double>(concepts_) / epsilon_;
}

double DegreeModel::exponent(GenFunction which) const {
  switch (which) {
    case GenFunction::kConceptNode:
      return static_cast<double>(texts_);
    case GenFunction::kTextNode:
      return static_cast<double>(concepts_);
    case GenFunction::kParentTextEdge:
      return parent_concepts() - 1.0;
    case GenFunction::kConceptEdge:
      return static_cast<double>(texts_) - 1.0;
  }
  return 0.0;
}

double DegreeModel::eval(GenFunction which, double x, int order) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("eval_gen: x must lie in [0,1], got " +
                      std::to_string(x));
  }
  return eval_deficit(which, 1.0 - x, order);
}

double DegreeModel::log_eval_deficit(GenFunction which, double s) const {
  const double n = exponent(which);
  if (mode_ == EvalMode::kPoissonLimit) return -n * p_ * s;
  if (n == 0.0) return 0.0;
  return n * std::log1p(-p_ * s);
}

double DegreeModel::eval_deficit(GenFunction which, double s,
                                 int order) const {
  if (order < 0 || order > 2) {
    throw ValidationError("eval_gen: derivative order must be 0, 1 or 2");
  }
  const double n = exponent(which);
  double coefficient = 1.0;
  double power = n;
  if (mode_ == EvalMode::kPoissonLimit) {
    coefficient = std::pow(n * p_, order);
  } else {
    if (order >= 1) coefficient *= n * p_;
    if (order == 2) coefficient *= (n - 1.0) * p_;
    power = n - order;
  }
  if (coefficient == 0.0) return 0.0;

  double log_value;
  if (mode_ == EvalMode::kPoissonLimit) {
    log_value = -n * p_ * s;
  } else {
    log_value = power == 0.0 ? 0.0 : power * std::log1p(-p_ * s);
  }
  if (log_value < kLogUnderflow) return 0.0;
  return coefficient * std::exp(log_value);
}

double DegreeModel::l_prime_at_one() const {
  return static_cast<double>(texts_) * p_;
}

DegreeModel DegreeModel::with_mode(EvalMode mode) const {
  DegreeModel copy = *this;
  copy.mode_ = mode;
  return copy;
}

double eval_gen(const DegreeModel& model, GenFunction which, double x,
                int order) {
  return model.eval(which, x, order);
}

double l_prime_at_one(const DegreeModel& model) {
  return model.l_prime_at_one();
}

}  // namespace scaling_lens
