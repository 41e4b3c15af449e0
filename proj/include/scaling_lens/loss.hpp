#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scaling_lens/optimizer.hpp"

namespace scaling_lens {

struct LossPoint {
  double C = 0.0;
  double N_star = 0.0;
  double P_b = 0.0;  // probability a concept stays unlearned
  double P_e_train_exact = 0.0;
  double P_e_train_approx = 0.0;  // 4 d_t^2 P_b^2 (quadratic approximation)
  double excess_entropy_lb = 0.0;
};

/// Probability that a text touches at least two unlearned concepts when each
/// concept is unlearned independently with probability P_b:
///   1 - (1 - d_t P_b / R)^R - d_t P_b (1 - d_t P_b / R)^(R - 1).
/// Throws DomainError unless 0 <= P_b <= 1, d_t >= 0 and d_t P_b <= R.
double training_error_exact(std::uint64_t R, double d_t, double P_b);

/// 4 d_t^2 eps^-2 P_b_raw^2, where P_b_raw = eps * P_b is the parent-graph
/// bit erasure rate.
double training_error_approx(double d_t, double P_b_raw, double epsilon);

/// 0.5 P_e^2.
double excess_entropy_lb(double P_e_train);

/// Leading-order constants of the two quadratic approximations, kept for the
/// metadata flag: the exact formula expands to 0.5 d_t^2 P_b^2 while the
/// reported approximation uses 4 d_t^2 P_b^2.
inline constexpr double kApproxConstant = 4.0;
inline constexpr double kSeriesConstant = 0.5;

/// optimize_budget -> threshold -> training error for each budget.
std::vector<LossPoint> frontier_loss_curve(std::span<const BudgetSpec> specs);

/// Same, reusing optima already computed for `specs`.
std::vector<LossPoint> frontier_loss_curve(std::span<const BudgetSpec> specs,
                                           std::span<const OptimumPoint> optima);

}  // namespace scaling_lens
