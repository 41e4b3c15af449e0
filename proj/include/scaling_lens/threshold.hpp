#pragma once

#include <string_view>

#include "scaling_lens/degree.hpp"
#include "scaling_lens/ensemble.hpp"

namespace scaling_lens {

/// How the density-evolution fixed point behaves as eps sweeps [eps_lo, eps_hi].
enum class Regime {
  kWaterfall,      // a jump (tangency) exists; eps_star is the threshold
  kAlwaysDecodes,  // no jump up to eps_hi; eps_star = eps_hi (sentinel)
  kContinuous,     // the fixed point moves continuously, no jump anywhere;
                   // eps_star = eps_lo (sentinel)
};

std::string_view to_string(Regime regime);

struct ThresholdSolution {
  double eps_star = 0.0;
  double x_star = 0.0;
  double nu_star = 0.0;
  double alpha = 0.0;
  Regime regime = Regime::kWaterfall;
  // Start of the waterfall search region (first local maximum of
  // eps(x) = x / lambda(1 - rho(1 - x))).
  double search_begin = 0.0;
  // Several local maxima of f(x, eps*) - x tied within 1e-9; the largest x
  // was taken.
  bool tied_maxima = false;

  bool has_transition() const { return regime == Regime::kWaterfall; }
};

struct ThresholdOptions {
  double eps_lo = 0.0;
  double eps_hi = 1.0;
  double tol = 1e-10;
  int grid_points = 2048;
  double x_min = 1e-9;
  int refinement_passes = 2;
};

/// f(x, eps) = eps * lambda(1 - rho(1 - x)).
double de_map(const ErasureEnsemble& ensemble, double x, double eps);
double de_map(const DegreeModel& model, double x, double eps);

/// Bisection on eps for the waterfall threshold. Throws DegenerateThreshold
/// if the upper branch already has a fixed point at eps_lo.
ThresholdSolution find_threshold(const ErasureEnsemble& ensemble,
                                 const ThresholdOptions& options = {});
ThresholdSolution find_threshold(const DegreeModel& model, double eps_lo = 0.0,
                                 double eps_hi = 1.0, double tol = 1e-10);

/// int_0^1 rho~_R / int_0^1 lambda_T, closed form.
double matching_upper_bound(const DegreeModel& model);

/// Finite-length scaling constant alpha at the critical point. Throws
/// NonPositiveRadicand when the bracketed sum is not positive.
double scaling_alpha(const ErasureEnsemble& ensemble, double x_star,
                     double eps_star);
double scaling_alpha(const DegreeModel& model, double x_star, double eps_star);

/// Complementary standard normal CDF.
double q_function(double z);

/// Largest x in [0, 1] with f(x, eps) = x (the point density evolution
/// converges to when started from x = 1).
double de_fixed_point(const ErasureEnsemble& ensemble, double eps);

/// eps * L(1 - rho(1 - x)) at the density-evolution fixed point: the
/// infinite-length bit erasure rate.
double asymptotic_erasure_rate(const ErasureEnsemble& ensemble, double eps);

/// nu* Q(sqrt(n) (eps* - eps) / alpha) with n the parent-graph length. Only
/// meaningful for Regime::kWaterfall.
double waterfall_erasure_rate(const ThresholdSolution& sol, double n,
                              double eps);

/// Post-decoding bit erasure rate of the parent graph at the model's epsilon.
///
/// In the waterfall regime this is nu(eps) Q(sqrt(R/eps) (eps* - eps)/alpha),
/// where nu(eps) = nu* for eps <= eps* and, above the threshold, the bit
/// erasure rate of the large density-evolution fixed point at eps (which
/// equals nu* at eps = eps*). Without a waterfall the density-evolution
/// rate at eps is returned directly.
double bit_erasure_rate(const DegreeModel& model, const ThresholdSolution& sol);

/// bit_erasure_rate / eps clamped to [0, 1].
double prob_concept_unlearned(const DegreeModel& model,
                              const ThresholdSolution& sol);

struct ModelAnalysis {
  ThresholdSolution solution;
  double bit_erasure_rate = 0.0;
  double prob_unlearned = 0.0;
};

/// find_threshold + bit_erasure_rate sharing one evaluation grid.
ModelAnalysis analyze_model(const DegreeModel& model,
                            const ThresholdOptions& options = {});

}  // namespace scaling_lens
