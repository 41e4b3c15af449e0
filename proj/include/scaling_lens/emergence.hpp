#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scaling_lens/optimizer.hpp"

namespace scaling_lens {

/// Skill levels 1..L; vectors are indexed by l - 1.
struct SkillHierarchy {
  std::vector<std::uint64_t> S;  // skills per level, >= 2
  std::vector<double> eta;       // co-occurrence thresholds, > 0
  std::vector<double> sigma;     // prerequisite counts, sigma_1 = 0

  std::size_t levels() const { return S.size(); }
  void validate() const;

  /// S^(l) = skills, eta_l = exp(eta_scale l / L), sigma_l = log2(l).
  static SkillHierarchy exponential(std::size_t L, std::uint64_t skills,
                                    double eta_scale = 7.0);
};

struct TaskTerm {
  std::size_t level = 1;  // 1-based
  unsigned arity = 1;     // m
  double weight = 0.0;
};

struct TaskSpec {
  std::vector<TaskTerm> terms;

  /// Throws ValidationError unless weights are nonnegative, sum to 1 within
  /// 1e-12, levels lie in [1, L] and arities are >= 1.
  void validate(std::size_t L) const;

  static TaskSpec homogeneous(std::size_t level, unsigned arity);
  /// q(l, m) = q(l) q(m); level_weights[i] is q(i + 1).
  static TaskSpec product(std::span<const double> level_weights,
                          const std::map<unsigned, double>& arity_weights);
};

/// Binomial(L, pi) restricted to l in 1..L and renormalised; entry i is q(i+1).
std::vector<double> task_mixture_binomial(std::size_t L, double pi);

/// sum_i w_i Binomial(L, pi_i), each component truncated at l = 0, then
/// renormalised.
std::vector<double> task_mixture_binomial(std::size_t L,
                                          std::span<const double> weights,
                                          std::span<const double> pis);

/// q(m) uniform on {lo, ..., hi}.
std::map<unsigned, double> uniform_arity(unsigned lo, unsigned hi);

/// (1/S^2) (1 - (1 - d_t^2/R^2)^T).
double concept_pair_prob(std::uint64_t R, std::uint64_t T, double d_t,
                         std::uint64_t S_l);

/// Chernoff-type lower bound on Pr{Binomial(binom(R,2), p_rr) >= eta_l}
/// times gamma_prev^(2 sigma_l), clamped to [0, 1].
double skill_link_prob(std::uint64_t R, double p_rr, double eta_l,
                       double sigma_l, double gamma_prev);

/// True when eta_l >= binom(R, 2); skill_link_prob is 0 there.
bool link_bound_degenerate(std::uint64_t R, double eta_l);

/// binom(R,2) D_KL(eta/binom(R,2) || p), Poisson-limit form when both
/// probabilities are below 1e-6.
double scaled_kl(double eta, double pairs, double p);

/// Principal branch of the Lambert W function on [-1/e, inf).
double lambert_w0(double z);

/// Giant-component fraction of an Erdos-Renyi graph with mean degree c:
/// the largest root of gamma = 1 - exp(-c gamma).
double gcc_fraction(double mean_degree);

struct LevelState {
  double p_rr = 0.0;
  double p_l = 0.0;
  double mean_degree = 0.0;
  double gamma = 0.0;
  bool degenerate_bound = false;
};

/// gamma_0 = 1, then p_rr, p_l and gamma_l for l = 1..L.
std::vector<LevelState> level_recursion(const SkillHierarchy& h,
                                        std::uint64_t R, std::uint64_t T,
                                        double d_t);
std::vector<double> level_gammas(const std::vector<LevelState>& levels);

/// sum q(l, m) gamma_l^m.
double task_accuracy(std::span<const double> gamma, const TaskSpec& task);

struct EmergencePoint {
  double C = 0.0;
  double N_star = 0.0;
  std::uint64_t R = 0;
  std::uint64_t T = 0;
  double accuracy = 0.0;
  std::vector<LevelState> levels;
  bool concepts_below_skills = false;  // R < max S^(l)
  bool degenerate_bound = false;
};

struct EmergenceCurve {
  std::vector<EmergencePoint> points;
};

/// optimize_budget -> level_recursion -> task_accuracy for each budget.
EmergenceCurve accuracy_vs_compute(std::span<const BudgetSpec> specs,
                                   const SkillHierarchy& h,
                                   const TaskSpec& task);

/// Same as above with the optima already computed (one per spec).
EmergenceCurve accuracy_vs_compute(std::span<const BudgetSpec> specs,
                                   std::span<const OptimumPoint> optima,
                                   const SkillHierarchy& h,
                                   const TaskSpec& task);

/// Compute-optimal points for every spec.
std::vector<OptimumPoint> frontier_optima(std::span<const BudgetSpec> specs);

enum class SegmentKind { kPlateau, kRise };
std::string_view to_string(SegmentKind kind);

struct Segment {
  SegmentKind kind = SegmentKind::kPlateau;
  std::size_t first = 0;  // point indices, inclusive
  std::size_t last = 0;
  double log10_c_begin = 0.0;
  double log10_c_end = 0.0;
  double accuracy_begin = 0.0;
  double accuracy_end = 0.0;
};

/// Splits the curve by the slope of accuracy against log10 C between
/// consecutive points. Flat runs (|slope| < slope_tol) narrower than
/// min_width_decades count as rises; adjacent segments of one kind merge.
/// Throws InsufficientPoints for fewer than 8 points.
std::vector<Segment> detect_plateaus(std::span<const double> log10_c,
                                     std::span<const double> accuracy,
                                     double slope_tol, double min_width_decades);
std::vector<Segment> detect_plateaus(const EmergenceCurve& curve,
                                     double slope_tol, double min_width_decades);

/// Plateaus that neither start at the first point nor end at the last.
std::size_t interior_plateaus(const std::vector<Segment>& segments);
std::size_t rise_count(const std::vector<Segment>& segments);

}  // namespace scaling_lens
