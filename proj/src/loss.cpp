#include "scaling_lens/loss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scaling_lens/errors.hpp"

namespace scaling_lens {
namespace {

// log1p(v) - v without cancellation for small |v|.
double log1pmx(double v) {
  if (std::abs(v) < 0.05) {
    double term = v;
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      term *= -v;
      const double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::log1p(v) - v;
}

}  // namespace

double training_error_exact(std::uint64_t R, double d_t, double P_b) {
  if (R == 0) throw DomainError("training_error_exact: R must be positive");
  if (!(P_b >= 0.0 && P_b <= 1.0)) {
    throw DomainError("training_error_exact: P_b must lie in [0,1]");
  }
  if (!(d_t >= 0.0) || !std::isfinite(d_t)) {
    throw DomainError("training_error_exact: d_t must be nonnegative");
  }
  const double r = static_cast<double>(R);
  const double y = d_t * P_b;
  if (y > r) {
    std::ostringstream msg;
    msg << "training_error_exact: d_t*P_b = " << y << " exceeds R = " << R;
    throw DomainError(msg.str());
  }
  if (R == 1 || y == 0.0) return 0.0;
  const double x = y / r;
  if (x >= 1.0) return 1.0;
  // 1 - (1-x)^(R-1) (1 + (R-1) x) written as -expm1 of a sum of two
  // log1p(v) - v terms; the linear parts cancel exactly.
  const double arg = (r - 1.0) * log1pmx(-x) + log1pmx((r - 1.0) * x);
  return std::clamp(-std::expm1(arg), 0.0, 1.0);
}

double training_error_approx(double d_t, double P_b_raw, double epsilon) {
  if (!(d_t >= 0.0) || !(P_b_raw >= 0.0) || !(epsilon > 0.0)) {
    throw DomainError("training_error_approx: inputs must be nonnegative");
  }
  const double q = d_t * P_b_raw / epsilon;
  return kApproxConstant * q * q;
}

double excess_entropy_lb(double P_e_train) {
  if (!(P_e_train >= 0.0 && P_e_train <= 1.0)) {
    throw DomainError("excess_entropy_lb: P_e must lie in [0,1]");
  }
  return 0.5 * P_e_train * P_e_train;
}

std::vector<LossPoint> frontier_loss_curve(std::span<const BudgetSpec> specs) {
  std::vector<OptimumPoint> optima;
  for (const BudgetSpec& s : specs) optima.push_back(optimize_budget(s));
  return frontier_loss_curve(specs, optima);
}

std::vector<LossPoint> frontier_loss_curve(std::span<const BudgetSpec> specs,
                                           std::span<const OptimumPoint> optima) {
  if (specs.size() != optima.size()) {
    throw ValidationError("frontier_loss_curve: one optimum per budget");
  }
  std::vector<LossPoint> out(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const BudgetSpec& s = specs[i];
    const OptimumPoint& opt = optima[i];
    LossPoint& lp = out[i];
    lp.C = s.C;
    lp.N_star = opt.N_star;
    lp.P_b = opt.prob_unlearned;
    lp.P_e_train_exact = training_error_exact(opt.R_star, s.d_t, lp.P_b);
    lp.P_e_train_approx =
        training_error_approx(s.d_t, s.epsilon * lp.P_b, s.epsilon);
    lp.excess_entropy_lb = excess_entropy_lb(lp.P_e_train_exact);
  }
  return out;
}

}  // namespace scaling_lens
