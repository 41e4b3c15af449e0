#pragma once

#include <cstdint>
#include <string_view>

namespace scaling_lens {

enum class GenFunction {
  kConceptNode,      // L_T(x)   = (px + 1 - p)^T
  kTextNode,         // P_R(x)   = (px + 1 - p)^R
  kParentTextEdge,   // rho~_R(x) = (px + 1 - p)^(R/eps - 1)
  kConceptEdge,      // lambda_T(x) = (px + 1 - p)^(T - 1)
};

enum class EvalMode {
  kExactLog,      // exp(n * log1p(p (x - 1)))
  kPoissonLimit,  // exp(-n p (1 - x))
};

std::string_view to_string(GenFunction which);

/// Concept-text degree model. Concepts have Binomial(T, p) degree, texts
/// Binomial(R, p), with p = d_t / R. The parent graph used for erasure
/// decoding has R / epsilon concepts.
class DegreeModel {
 public:
  /// Throws ValidationError unless R, T >= 1, 0 < d_t < R and 0 < epsilon < 1.
  DegreeModel(std::uint64_t concepts, std::uint64_t texts, double text_degree,
              double epsilon = 0.5, EvalMode mode = EvalMode::kExactLog);

  std::uint64_t concepts() const { return concepts_; }
  std::uint64_t texts() const { return texts_; }
  double text_degree() const { return text_degree_; }
  double epsilon() const { return epsilon_; }
  double edge_probability() const { return p_; }
  EvalMode mode() const { return mode_; }

  /// Mean concept degree d_r = d_t T / R.
  double concept_degree() const;
  /// Number of concepts in the parent graph, R / epsilon (not rounded).
  double parent_concepts() const;

  /// Real exponent n of (px + 1 - p)^n for the given function.
  double exponent(GenFunction which) const;

  /// Value (order 0) or derivative (order 1, 2) at x in [0, 1].
  double eval(GenFunction which, double x, int order = 0) const;

  /// Same as eval() at x = 1 - s. Avoids the cancellation in 1 - s for tiny s.
  double eval_deficit(GenFunction which, double s, int order = 0) const;

  /// log of eval_deficit(which, s, 0); finite where the value underflows.
  double log_eval_deficit(GenFunction which, double s) const;

  /// L'_T(1) = T p, exactly.
  double l_prime_at_one() const;

  DegreeModel with_mode(EvalMode mode) const;

 private:
  std::uint64_t concepts_;
  std::uint64_t texts_;
  double text_degree_;
  double epsilon_;
  double p_;
  EvalMode mode_;
};

/// eval_gen as a free function.
double eval_gen(const DegreeModel& model, GenFunction which, double x,
                int order = 0);

double l_prime_at_one(const DegreeModel& model);

}  // namespace scaling_lens
