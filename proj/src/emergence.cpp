#include "scaling_lens/emergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scaling_lens/errors.hpp"
#include "scaling_lens/parallel.hpp"

namespace scaling_lens {
namespace {

double pair_count(std::uint64_t R) {
  const double r = static_cast<double>(R);
  return 0.5 * r * (r - 1.0);
}

double binomial_log_pmf(std::size_t L, std::size_t l, double pi) {
  const double n = static_cast<double>(L), k = static_cast<double>(l);
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * std::log(pi) + (n - k) * std::log1p(-pi);
}

}  // namespace

void SkillHierarchy::validate() const {
  const std::size_t L = S.size();
  if (L == 0) throw ValidationError("SkillHierarchy: need at least one level");
  if (eta.size() != L || sigma.size() != L) {
    throw ValidationError("SkillHierarchy: S, eta and sigma lengths differ");
  }
  for (std::size_t i = 0; i < L; ++i) {
    const std::string at = " at level " + std::to_string(i + 1);
    if (S[i] < 2) throw ValidationError("SkillHierarchy: S < 2" + at);
    if (!(eta[i] > 0.0) || !std::isfinite(eta[i])) {
      throw ValidationError("SkillHierarchy: eta must be positive" + at);
    }
    if (!(sigma[i] >= 0.0) || !std::isfinite(sigma[i])) {
      throw ValidationError("SkillHierarchy: sigma must be nonnegative" + at);
    }
  }
  if (sigma[0] != 0.0) throw ValidationError("SkillHierarchy: sigma_1 must be 0");
}

SkillHierarchy SkillHierarchy::exponential(std::size_t L,
                                           std::uint64_t skills,
                                           double eta_scale) {
  SkillHierarchy h;
  for (std::size_t l = 1; l <= L; ++l) {
    h.S.push_back(skills);
    h.eta.push_back(std::exp(eta_scale * static_cast<double>(l) / static_cast<double>(L)));
    h.sigma.push_back(std::log2(static_cast<double>(l)));
  }
  return h;
}

void TaskSpec::validate(std::size_t L) const {
  if (terms.empty()) throw ValidationError("TaskSpec: no terms");
  double total = 0.0;
  for (const TaskTerm& t : terms) {
    if (t.level < 1 || t.level > L) {
      throw ValidationError("TaskSpec: level " + std::to_string(t.level) +
                            " outside [1, " + std::to_string(L) + "]");
    }
    if (t.arity < 1) throw ValidationError("TaskSpec: arity must be >= 1");
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
      throw ValidationError("TaskSpec: weights must be nonnegative");
    }
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "TaskSpec: weights sum to " << total << ", expected 1";
    throw ValidationError(msg.str());
  }
}

TaskSpec TaskSpec::homogeneous(std::size_t level, unsigned arity) {
  return TaskSpec{{TaskTerm{level, arity, 1.0}}};
}

TaskSpec TaskSpec::product(std::span<const double> level_weights,
                           const std::map<unsigned, double>& arity_weights) {
  TaskSpec t;
  for (std::size_t i = 0; i < level_weights.size(); ++i) {
    if (level_weights[i] == 0.0) continue;
    for (const auto& [m, qm] : arity_weights) {
      if (qm == 0.0) continue;
      t.terms.push_back(TaskTerm{i + 1, m, level_weights[i] * qm});
    }
  }
  return t;
}

std::vector<double> task_mixture_binomial(std::size_t L, double pi) {
  const double w = 1.0;
  return task_mixture_binomial(L, std::span<const double>(&w, 1),
                               std::span<const double>(&pi, 1));
}

std::vector<double> task_mixture_binomial(std::size_t L,
                                          std::span<const double> weights,
                                          std::span<const double> pis) {
  if (L == 0) throw ValidationError("task_mixture_binomial: L >= 1");
  if (weights.size() != pis.size() || weights.empty()) {
    throw ValidationError("task_mixture_binomial: weights and pis must pair up");
  }
  std::vector<double> q(L, 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double pi = pis[k];
    if (!(pi > 0.0 && pi < 1.0)) {
      throw ValidationError("task_mixture_binomial: pi must lie in (0,1)");
    }
    if (!(weights[k] >= 0.0)) {
      throw ValidationError("task_mixture_binomial: weights must be nonnegative");
    }
    std::vector<double> comp(L);
    for (std::size_t l = 1; l <= L; ++l) {
      comp[l - 1] = std::exp(binomial_log_pmf(L, l, pi));
    }
    const double mass = pairwise_sum(comp);
    for (std::size_t l = 0; l < L; ++l) q[l] += weights[k] * comp[l] / mass;
  }
  const double total = pairwise_sum(q);
  if (!(total > 0.0)) throw ValidationError("task_mixture_binomial: zero mass");
  for (double& v : q) v /= total;
  return q;
}

std::map<unsigned, double> uniform_arity(unsigned lo, unsigned hi) {
  if (lo < 1 || hi < lo) throw ValidationError("uniform_arity: need 1 <= lo <= hi");
  std::map<unsigned, double> q;
  for (unsigned m = lo; m <= hi; ++m) q[m] = 1.0 / static_cast<double>(hi - lo + 1);
  return q;
}

double concept_pair_prob(std::uint64_t R, std::uint64_t T, double d_t,
                         std::uint64_t S_l) {
  if (R == 0 || S_l == 0) throw DomainError("concept_pair_prob: R, S >= 1");
  if (!(d_t >= 0.0) || d_t > static_cast<double>(R)) {
    throw DomainError("concept_pair_prob: need 0 <= d_t <= R");
  }
  const double s = static_cast<double>(S_l);
  if (T == 0 || d_t == 0.0) return 0.0;
  const double q = d_t / static_cast<double>(R);
  const double co = q >= 1.0 ? 1.0
                             : -std::expm1(static_cast<double>(T) * std::log1p(-q * q));
  return co / (s * s);
}

double scaled_kl(double eta, double pairs, double p) {
  const double a = eta / pairs;
  if (a < 1e-6 && p < 1e-6) {
    const double mu = pairs * p;
    return eta * std::log(eta / mu) - eta + mu;
  }
  return pairs * (a * std::log(a / p) + (1.0 - a) * (std::log1p(-a) - std::log1p(-p)));
}

bool link_bound_degenerate(std::uint64_t R, double eta_l) {
  return eta_l >= pair_count(R);
}

double skill_link_prob(std::uint64_t R, double p_rr, double eta_l,
                       double sigma_l, double gamma_prev) {
  if (!(gamma_prev >= 0.0 && gamma_prev <= 1.0)) {
    throw DomainError("skill_link_prob: gamma_prev must lie in [0,1]");
  }
  if (!(p_rr >= 0.0 && p_rr <= 1.0)) {
    throw DomainError("skill_link_prob: p_rr must lie in [0,1]");
  }
  if (!(eta_l > 0.0) || !std::isfinite(eta_l)) {
    throw DomainError("skill_link_prob: eta must be positive");
  }
  if (!(sigma_l >= 0.0)) throw DomainError("skill_link_prob: sigma must be >= 0");
  if (link_bound_degenerate(R, eta_l)) return 0.0;
  const double prereq = std::pow(gamma_prev, 2.0 * sigma_l);
  if (prereq == 0.0 || p_rr == 0.0) return 0.0;
  if (p_rr == 1.0) return prereq;

  const double pairs = pair_count(R);
  const double mu = pairs * p_rr;
  const double kl = scaled_kl(eta_l, pairs, p_rr);
  const double a = 1.0 / std::sqrt(8.0 * eta_l * (1.0 - eta_l / pairs));
  // Below the mean the prefactor acts as a floor so the two branches meet at
  // eta = mu.
  const double core = eta_l <= mu ? std::max(-std::expm1(-kl), a)
                                  : a * std::exp(-kl);
  return std::clamp(core, 0.0, 1.0) * prereq;
}

double lambert_w0(double z) {
  constexpr double kInvE = 0.36787944117144233;
  if (std::isnan(z) || z < -kInvE - 1e-12) {
    std::ostringstream msg;
    msg << "lambert_w0: z = " << z << " below -1/e";
    throw DomainError(msg.str());
  }
  if (z <= -kInvE) return -1.0;
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;

  double w;
  if (z < -0.25) {
    const double p = std::sqrt(2.0 * (std::numbers::e * z + 1.0));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  } else if (z < 3.0) {
    w = std::log1p(z);
  } else {
    const double l1 = std::log(z), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    if (f == 0.0) break;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double dw = f / denom;
    if (!std::isfinite(dw)) break;
    w -= dw;
    if (std::abs(dw) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return std::max(w, -1.0);
}

double gcc_fraction(double mean_degree) {
  const double c = mean_degree;
  if (!(c >= 0.0)) throw DomainError("gcc_fraction: mean degree must be >= 0");
  if (c <= 1.0) return 0.0;
  if (std::isinf(c)) return 1.0;
  double g = 1.0 + lambert_w0(-c * std::exp(-c)) / c;
  // Newton on h(g) = g - 1 + exp(-c g); h' > 0 at the nonzero root.
  for (int it = 0; it < 8; ++it) {
    const double h = g + std::expm1(-c * g);
    const double dh = 1.0 - c * std::exp(-c * g);
    if (!(dh > 0.0)) break;
    const double next = std::clamp(g - h / dh, 0.0, 1.0);
    if (next == g) break;
    g = next;
  }
  const double residual = std::abs(g + std::expm1(-c * g));
  if (!(residual < 1e-10) || !(g > 0.0)) {
    std::ostringstream msg;
    msg << "gcc_fraction: residual " << residual << " at c = " << c;
    throw NumericError(msg.str());
  }
  return g;
}

std::vector<LevelState> level_recursion(const SkillHierarchy& h,
                                        std::uint64_t R, std::uint64_t T,
                                        double d_t) {
  h.validate();
  std::vector<LevelState> out(h.levels());
  double gamma_prev = 1.0;
  for (std::size_t i = 0; i < h.levels(); ++i) {
    LevelState& s = out[i];
    s.p_rr = concept_pair_prob(R, T, d_t, h.S[i]);
    s.degenerate_bound = link_bound_degenerate(R, h.eta[i]);
    s.p_l = skill_link_prob(R, s.p_rr, h.eta[i], h.sigma[i], gamma_prev);
    s.mean_degree = s.p_l * static_cast<double>(h.S[i]);
    s.gamma = gcc_fraction(s.mean_degree);
    gamma_prev = s.gamma;
  }
  return out;
}

std::vector<double> level_gammas(const std::vector<LevelState>& levels) {
  std::vector<double> g;
  g.reserve(levels.size());
  for (const LevelState& s : levels) g.push_back(s.gamma);
  return g;
}

double task_accuracy(std::span<const double> gamma, const TaskSpec& task) {
  task.validate(gamma.size());
  double acc = 0.0;
  for (const TaskTerm& t : task.terms) {
    acc += t.weight * std::pow(gamma[t.level - 1], static_cast<double>(t.arity));
  }
  return std::clamp(acc, 0.0, 1.0);
}

std::vector<OptimumPoint> frontier_optima(std::span<const BudgetSpec> specs) {
  std::vector<OptimumPoint> out;
  out.reserve(specs.size());
  for (const BudgetSpec& s : specs) out.push_back(optimize_budget(s));
  return out;
}

EmergenceCurve accuracy_vs_compute(std::span<const BudgetSpec> specs,
                                   const SkillHierarchy& h,
                                   const TaskSpec& task) {
  h.validate();
  task.validate(h.levels());
  const std::vector<OptimumPoint> optima = frontier_optima(specs);
  return accuracy_vs_compute(specs, optima, h, task);
}

EmergenceCurve accuracy_vs_compute(std::span<const BudgetSpec> specs,
                                   std::span<const OptimumPoint> optima,
                                   const SkillHierarchy& h,
                                   const TaskSpec& task) {
  if (specs.size() != optima.size()) {
    throw ValidationError("accuracy_vs_compute: one optimum per budget");
  }
  h.validate();
  task.validate(h.levels());
  const std::uint64_t max_s = *std::max_element(h.S.begin(), h.S.end());
  EmergenceCurve curve;
  curve.points.resize(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    EmergencePoint& pt = curve.points[i];
    pt.C = specs[i].C;
    pt.N_star = optima[i].N_star;
    pt.R = optima[i].R_star;
    pt.T = optima[i].T_star;
    pt.levels = level_recursion(h, pt.R, pt.T, specs[i].d_t);
    pt.accuracy = task_accuracy(level_gammas(pt.levels), task);
    pt.concepts_below_skills = pt.R < max_s;
    pt.degenerate_bound =
        std::any_of(pt.levels.begin(), pt.levels.end(),
                    [](const LevelState& s) { return s.degenerate_bound; });
  });
  return curve;
}

std::string_view to_string(SegmentKind kind) {
  return kind == SegmentKind::kPlateau ? "plateau" : "rise";
}

std::vector<Segment> detect_plateaus(std::span<const double> log10_c,
                                     std::span<const double> accuracy,
                                     double slope_tol,
                                     double min_width_decades) {
  const std::size_t n = log10_c.size();
  if (accuracy.size() != n) {
    throw ValidationError("detect_plateaus: length mismatch");
  }
  if (n < 8) throw InsufficientPoints("detect_plateaus: need at least 8 points");
  if (!(slope_tol > 0.0) || !(min_width_decades >= 0.0)) {
    throw ValidationError("detect_plateaus: slope_tol > 0, min_width >= 0");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(log10_c[i] > log10_c[i - 1])) {
      throw ValidationError("detect_plateaus: C must be strictly increasing");
    }
  }

  // Runs of intervals; interval i joins points i and i + 1.
  struct Run {
    SegmentKind kind;
    std::size_t first, last;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slope =
        (accuracy[i + 1] - accuracy[i]) / (log10_c[i + 1] - log10_c[i]);
    const SegmentKind k =
        std::abs(slope) < slope_tol ? SegmentKind::kPlateau : SegmentKind::kRise;
    if (!runs.empty() && runs.back().kind == k) {
      runs.back().last = i;
    } else {
      runs.push_back({k, i, i});
    }
  }
  if (runs.size() > 1) {
    for (Run& r : runs) {
      const double width = log10_c[r.last + 1] - log10_c[r.first];
      if (r.kind == SegmentKind::kPlateau && width < min_width_decades) {
        r.kind = SegmentKind::kRise;
      }
    }
  }
  std::vector<Segment> out;
  for (const Run& r : runs) {
    if (!out.empty() && out.back().kind == r.kind) {
      out.back().last = r.last + 1;
    } else {
      Segment s;
      s.kind = r.kind;
      s.first = r.first;
      s.last = r.last + 1;
      out.push_back(s);
    }
  }
  for (Segment& s : out) {
    s.log10_c_begin = log10_c[s.first];
    s.log10_c_end = log10_c[s.last];
    s.accuracy_begin = accuracy[s.first];
    s.accuracy_end = accuracy[s.last];
  }
  return out;
}

std::vector<Segment> detect_plateaus(const EmergenceCurve& curve,
                                     double slope_tol,
                                     double min_width_decades) {
  std::vector<double> lc, acc;
  for (const EmergencePoint& p : curve.points) {
    lc.push_back(std::log10(p.C));
    acc.push_back(p.accuracy);
  }
  return detect_plateaus(lc, acc, slope_tol, min_width_decades);
}

std::size_t interior_plateaus(const std::vector<Segment>& segments) {
  if (segments.empty()) return 0;
  const std::size_t end = segments.back().last;
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [&](const Segment& s) {
        return s.kind == SegmentKind::kPlateau && s.first > 0 && s.last < end;
      }));
}

std::size_t rise_count(const std::vector<Segment>& segments) {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [](const Segment& s) {
        return s.kind == SegmentKind::kRise;
      }));
}

}  // namespace scaling_lens
