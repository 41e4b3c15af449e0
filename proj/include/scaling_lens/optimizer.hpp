#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scaling_lens/threshold.hpp"

namespace scaling_lens {

struct BudgetSpec {
  double C = 0.0;         // compute budget in FLOPs
  double varsigma = 1.0;  // parameters per concept, N = varsigma * R
  double tau = 1.0;       // tokens per text, D = tau * T
  double d_t = 6.0;
  double epsilon = 0.5;

  /// C' = C / (6 varsigma tau).
  double reduced_budget() const;
  /// Throws ValidationError unless all fields are valid and C' > 1.
  void validate() const;
};

struct OptimumPoint {
  std::uint64_t R_star = 0;
  std::uint64_t T_star = 0;
  double N_star = 0.0;
  double D_star = 0.0;
  double objective = 0.0;
  double eps_star_at_opt = 0.0;
  Regime regime_at_opt = Regime::kWaterfall;
  double prob_unlearned = 0.0;
};

/// R (1 - Pr{concept unlearned}) for the model (R, T, d_t, eps), in [0, R].
double expected_learned(std::uint64_t R, std::uint64_t T,
                        const BudgetSpec& spec);

struct IsoflopPoint {
  double C = 0.0;
  std::uint64_t R = 0;
  std::uint64_t T = 0;
  double N = 0.0;
  double D = 0.0;
  double eps_star = 0.0;
  Regime regime = Regime::kWaterfall;
  double objective = 0.0;
};

struct RGrid {
  double points_per_decade = 64.0;
  // Zero means the full feasible range [smallest R > d_t, floor(C')].
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Smallest feasible R (an integer strictly above d_t, since p = d_t/R < 1)
/// and the largest, floor(C').
std::uint64_t min_concepts(const BudgetSpec& spec);
std::uint64_t max_concepts(const BudgetSpec& spec);

/// Objective along a geometric R grid with T = floor(C'/R). Integer R values
/// are deduplicated. Throws EmptyGrid when no feasible R remains.
std::vector<IsoflopPoint> isoflop_curve(const BudgetSpec& spec,
                                        const RGrid& grid = {});

/// Coarse geometric scan followed by golden-section refinement on log R.
/// Small feasible ranges are scanned exhaustively.
OptimumPoint optimize_budget(const BudgetSpec& spec,
                             double points_per_decade = 64.0);

struct ScalingFit {
  double a = 0.0;  // slope of log N* against log C
  double b = 0.0;  // slope of log D* against log C
  double r2 = 0.0; // smaller of the two coefficients of determination
  std::vector<OptimumPoint> optima;
};

/// Least-squares log-log slopes over the optima of `specs` (at least 5).
ScalingFit scaling_exponents(std::span<const BudgetSpec> specs);

/// `count` budgets log-spaced over [c_lo, c_hi], other fields from `base`.
std::vector<BudgetSpec> budget_sweep(const BudgetSpec& base, double c_lo,
                                     double c_hi, std::size_t count);

/// Ordinary least squares y = intercept + slope x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace scaling_lens
