#include "scaling_lens/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "scaling_lens/errors.hpp"

namespace scaling_lens {
namespace {

constexpr double kTieTol = 1e-9;
constexpr double kInvPhi = 0.6180339887498949;
constexpr int kRefinePoints = 64;
constexpr int kGoldenIterations = 80;
constexpr std::size_t kMaxPeaks = 8;

// Density-evolution quantities on a log-spaced x grid over (x_min, 1].
class DeGrid {
 public:
  DeGrid(const ErasureEnsemble& ensemble, const ThresholdOptions& options)
      : ensemble_(ensemble) {
    const int n = std::max(options.grid_points, 16);
    x_.resize(n);
    lambda_.resize(n);
    log_eps_.resize(n);
    const double log_min = std::log(options.x_min);
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      x_[i] = i + 1 == n ? 1.0 : std::exp(log_min * (1.0 - t));
      const double s = ensemble_.rho_deficit(x_[i]);
      lambda_[i] = ensemble_.lambda_deficit(s);
      log_eps_[i] = std::log(x_[i]) - ensemble_.log_lambda_deficit(s);
    }
    // First local maximum of eps(x) separates the error-floor branch from
    // the waterfall branch.
    begin_ = n;
    for (int i = 0; i + 1 < n; ++i) {
      const double slack = 1e-12 * std::max(1.0, std::abs(log_eps_[i]));
      if (log_eps_[i + 1] < log_eps_[i] - slack) {
        begin_ = i;
        break;
      }
    }
  }

  std::size_t size() const { return x_.size(); }
  bool continuous() const { return begin_ >= x_.size(); }
  std::size_t begin() const { return begin_; }
  double x(std::size_t i) const { return x_[i]; }

  double excess(double x, double eps) const {
    return eps * ensemble_.lambda_deficit(ensemble_.rho_deficit(x)) - x;
  }
  double grid_excess(std::size_t i, double eps) const {
    return eps * lambda_[i] - x_[i];
  }
  double log_eps_at(double x) const {
    return std::log(x) -
           ensemble_.log_lambda_deficit(ensemble_.rho_deficit(x));
  }

  struct Maximum {
    double x = 0.0;
    double value = 0.0;
    double lo = 0.0;  // bracket around x
    double hi = 0.0;
    bool tied = false;
  };

  // max of f(x, eps) - x over the waterfall region. Every grid-local maximum
  // is refined: the grid can miss a narrow peak by more than the gap to a
  // flat competitor.
  Maximum maximize(double eps, int passes) const {
    const std::size_t n = x_.size();
    std::vector<std::size_t> peaks;
    for (std::size_t i = begin_; i < n; ++i) {
      const double g = grid_excess(i, eps);
      const bool left_ok = i == begin_ || g >= grid_excess(i - 1, eps);
      const bool right_ok = i + 1 == n || g >= grid_excess(i + 1, eps);
      if (left_ok && right_ok && (peaks.empty() || i > peaks.back() + 1)) {
        peaks.push_back(i);
      }
    }
    if (peaks.size() > kMaxPeaks) {
      std::partial_sort(peaks.begin(), peaks.begin() + kMaxPeaks, peaks.end(),
                        [&](std::size_t a, std::size_t b) {
                          return grid_excess(a, eps) > grid_excess(b, eps);
                        });
      peaks.resize(kMaxPeaks);
    }
    std::vector<Maximum> refined;
    double best = -INFINITY;
    for (std::size_t i : peaks) {
      refined.push_back(refine(i, eps, passes));
      best = std::max(best, refined.back().value);
    }
    // Among maxima within kTieTol of the best, take the largest x.
    // The x -> 0 end, where f - x tends to 0 from below, is not a contender.
    Maximum m;
    bool found = false;
    int contenders = 0;
    for (std::size_t k = 0; k < refined.size(); ++k) {
      const Maximum& r = refined[k];
      if (r.value >= best - kTieTol) {
        if (!found || r.x > m.x) m = r;
        found = true;
        if (peaks[k] != 0) ++contenders;
      }
    }
    m.tied = contenders > 1;
    return m;
  }

  Maximum refine(std::size_t pick, double eps, int passes) const {
    const std::size_t n = x_.size();
    Maximum m;
    m.lo = x_[pick > begin_ ? pick - 1 : begin_];
    m.hi = x_[std::min(pick + 1, n - 1)];
    m.x = x_[pick];
    m.value = grid_excess(pick, eps);

    for (int pass = 0; pass < passes; ++pass) {
      if (m.hi <= m.lo) break;
      std::vector<double> xs(kRefinePoints);
      std::size_t arg = 0;
      double val = -INFINITY;
      for (int k = 0; k < kRefinePoints; ++k) {
        xs[k] = m.lo + (m.hi - m.lo) * k / (kRefinePoints - 1);
        const double g = excess(xs[k], eps);
        if (g >= val) {
          val = g;
          arg = k;
        }
      }
      m.lo = xs[arg > 0 ? arg - 1 : 0];
      m.hi = xs[std::min<std::size_t>(arg + 1, kRefinePoints - 1)];
      if (val > m.value) {
        m.value = val;
        m.x = xs[arg];
      }
    }
    // Golden-section polish on the final bracket.
    double a = m.lo, b = m.hi;
    if (b > a) {
      double c = b - kInvPhi * (b - a);
      double d = a + kInvPhi * (b - a);
      double gc = excess(c, eps), gd = excess(d, eps);
      for (int it = 0; it < kGoldenIterations && b - a > 1e-15; ++it) {
        if (gc >= gd) {
          b = d;
          d = c;
          gd = gc;
          c = b - kInvPhi * (b - a);
          gc = excess(c, eps);
        } else {
          a = c;
          c = d;
          gc = gd;
          d = a + kInvPhi * (b - a);
          gd = excess(d, eps);
        }
      }
      const double xm = 0.5 * (a + b);
      const double gm = excess(xm, eps);
      if (gm > m.value) {
        m.value = gm;
        m.x = xm;
      }
    }
    return m;
  }

  // argmin of log eps(x) on [lo, hi].
  double minimize_eps(double lo, double hi) const {
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = log_eps_at(c), fd = log_eps_at(d);
    for (int it = 0; it < kGoldenIterations && b - a > 1e-15; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = log_eps_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = log_eps_at(d);
      }
    }
    return 0.5 * (a + b);
  }

  // Largest root of f(x, eps) = x in [0, 1].
  double largest_fixed_point(double eps) const {
    const std::size_t n = x_.size();
    std::size_t i = n;
    while (i-- > 0) {
      if (grid_excess(i, eps) >= 0.0) break;
    }
    if (i == n - 1) return 1.0;
    double lo, hi;
    if (i < n) {
      lo = x_[i];
      hi = x_[i + 1];
    } else {
      if (excess(0.0, eps) <= 0.0) return 0.0;
      lo = 0.0;
      hi = x_[0];
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (excess(mid, eps) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  const ErasureEnsemble& ensemble() const { return ensemble_; }

 private:
  const ErasureEnsemble& ensemble_;
  std::vector<double> x_;
  std::vector<double> lambda_;
  std::vector<double> log_eps_;
  std::size_t begin_ = 0;
};

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << name << " must lie in [0,1], got " << v;
    throw DomainError(msg.str());
  }
}

ThresholdSolution solve(const DeGrid& grid, const ThresholdOptions& options) {
  ThresholdSolution sol;
  if (grid.continuous()) {
    sol.regime = Regime::kContinuous;
    sol.eps_star = options.eps_lo;
    return sol;
  }
  sol.search_begin = grid.x(grid.begin());
  const int passes = options.refinement_passes;

  if (grid.maximize(options.eps_hi, passes).value < 0.0) {
    sol.regime = Regime::kAlwaysDecodes;
    sol.eps_star = options.eps_hi;
    return sol;
  }
  if (grid.maximize(options.eps_lo, passes).value >= 0.0) {
    std::ostringstream msg;
    msg << "find_threshold: fixed point already exists at eps_lo="
        << options.eps_lo;
    throw DegenerateThreshold(msg.str());
  }

  double lo = options.eps_lo, hi = options.eps_hi;
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    if (grid.maximize(mid, passes).value >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const DeGrid::Maximum at_hi = grid.maximize(hi, passes);
  sol.tied_maxima = at_hi.tied;

  // Polish to the exact tangency: the local minimum of eps(x).
  const double span = std::max(at_hi.hi - at_hi.lo, 1e-6 * at_hi.x);
  const double x_lo = std::max(sol.search_begin, at_hi.x - span);
  const double x_hi = std::min(1.0, at_hi.x + span);
  const double x_star = grid.minimize_eps(x_lo, x_hi);
  const double eps_star = std::exp(grid.log_eps_at(x_star));
  if (eps_star <= hi + options.tol && eps_star >= lo - options.tol) {
    sol.x_star = x_star;
    sol.eps_star = eps_star;
  } else {
    sol.x_star = at_hi.x;
    sol.eps_star = hi;
  }

  const ErasureEnsemble& ens = grid.ensemble();
  sol.nu_star = sol.eps_star * ens.node_deficit(ens.rho_deficit(sol.x_star));
  sol.alpha = scaling_alpha(ens, sol.x_star, sol.eps_star);
  return sol;
}

void check_options(const ThresholdOptions& options) {
  if (!(options.eps_lo >= 0.0 && options.eps_lo < options.eps_hi &&
        options.eps_hi <= 1.0)) {
    throw ValidationError("find_threshold: need 0 <= eps_lo < eps_hi <= 1");
  }
  if (!(options.tol > 0.0)) {
    throw ValidationError("find_threshold: tol must be positive");
  }
}

double bit_erasure_rate_impl(const DeGrid& grid, const DegreeModel& model,
                             const ThresholdSolution& sol) {
  const ErasureEnsemble& ens = grid.ensemble();
  const double eps = model.epsilon();
  auto de_rate = [&] {
    const double x = grid.largest_fixed_point(eps);
    return eps * ens.node_deficit(ens.rho_deficit(x));
  };
  if (sol.regime != Regime::kWaterfall) return de_rate();

  double prefactor = sol.nu_star;
  if (eps > sol.eps_star) prefactor = std::max(prefactor, de_rate());
  const double z = std::sqrt(model.parent_concepts()) *
                   (sol.eps_star - eps) / sol.alpha;
  return prefactor * q_function(z);
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kWaterfall:
      return "waterfall";
    case Regime::kAlwaysDecodes:
      return "always_decodes";
    case Regime::kContinuous:
      return "continuous";
  }
  return "?";
}

double de_map(const ErasureEnsemble& ensemble, double x, double eps) {
  check_unit(x, "de_map: x");
  check_unit(eps, "de_map: eps");
  return eps * ensemble.lambda_deficit(ensemble.rho_deficit(x));
}

double de_map(const DegreeModel& model, double x, double eps) {
  return de_map(BinomialEnsemble(model), x, eps);
}

ThresholdSolution find_threshold(const ErasureEnsemble& ensemble,
                                 const ThresholdOptions& options) {
  check_options(options);
  const DeGrid grid(ensemble, options);
  return solve(grid, options);
}

ThresholdSolution find_threshold(const DegreeModel& model, double eps_lo,
                                 double eps_hi, double tol) {
  ThresholdOptions options;
  options.eps_lo = eps_lo;
  options.eps_hi = eps_hi;
  options.tol = tol;
  return find_threshold(BinomialEnsemble(model), options);
}

double matching_upper_bound(const DegreeModel& model) {
  const double p = model.edge_probability();
  // int_0^1 (px + 1 - p)^(n-1) dx = (1 - (1-p)^n) / (n p)
  auto integral = [p](double n) {
    return -std::expm1(n * std::log1p(-p)) / (n * p);
  };
  return integral(model.parent_concepts()) /
         integral(static_cast<double>(model.texts()));
}

double scaling_alpha(const ErasureEnsemble& ens, double x_star,
                     double eps_star) {
  if (!(x_star > 0.0 && x_star < 1.0)) {
    throw DomainError("scaling_alpha: x_star must lie in (0,1)");
  }
  if (!(eps_star > 0.0 && eps_star <= 1.0)) {
    throw DomainError("scaling_alpha: eps_star must lie in (0,1]");
  }
  const double x = x_star;
  const double xb = 1.0 - x;
  const double xb2_deficit = x * (2.0 - x);  // 1 - xb^2

  const double rho_xb = ens.rho_deficit(x);
  const double drho_xb = ens.rho_deficit(x, 1);
  const double rho_xb2 = ens.rho_deficit(xb2_deficit);
  const double drho_xb2 = ens.rho_deficit(xb2_deficit, 1);

  const double s = rho_xb;  // y* = 1 - s
  const double y = 1.0 - s;
  const double y2_deficit = s * (2.0 - s);  // 1 - y^2
  const double lam_y = ens.lambda_deficit(s);
  const double lam_y2 = ens.lambda_deficit(y2_deficit);
  const double dlam_y2 = ens.lambda_deficit(y2_deficit, 1);

  const double lp = ens.l_prime_at_one();
  const double e2 = eps_star * eps_star;

  const double check_term =
      (rho_xb * rho_xb - rho_xb2 + drho_xb * (1.0 - 2.0 * x * rho_xb) -
       xb * xb * drho_xb2) /
      (lp * lam_y * lam_y * drho_xb * drho_xb);
  const double variable_term =
      (e2 * lam_y * lam_y - e2 * lam_y2 - y * y * e2 * dlam_y2) /
      (lp * lam_y * lam_y);
  const double radicand = check_term + variable_term;
  if (!(radicand > 0.0) || !std::isfinite(radicand)) {
    std::ostringstream msg;
    msg << "scaling_alpha: radicand " << radicand << " at x*=" << x_star
        << ", eps*=" << eps_star;
    throw NonPositiveRadicand(msg.str());
  }
  return std::sqrt(radicand);
}

double scaling_alpha(const DegreeModel& model, double x_star,
                     double eps_star) {
  return scaling_alpha(BinomialEnsemble(model), x_star, eps_star);
}

double q_function(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double de_fixed_point(const ErasureEnsemble& ensemble, double eps) {
  check_unit(eps, "de_fixed_point: eps");
  const DeGrid grid(ensemble, ThresholdOptions{});
  return grid.largest_fixed_point(eps);
}

double asymptotic_erasure_rate(const ErasureEnsemble& ensemble, double eps) {
  const double x = de_fixed_point(ensemble, eps);
  return eps * ensemble.node_deficit(ensemble.rho_deficit(x));
}

double waterfall_erasure_rate(const ThresholdSolution& sol, double n,
                              double eps) {
  return sol.nu_star *
         q_function(std::sqrt(n) * (sol.eps_star - eps) / sol.alpha);
}

double bit_erasure_rate(const DegreeModel& model,
                        const ThresholdSolution& sol) {
  const BinomialEnsemble ens(model);
  const DeGrid grid(ens, ThresholdOptions{});
  return bit_erasure_rate_impl(grid, model, sol);
}

double prob_concept_unlearned(const DegreeModel& model,
                              const ThresholdSolution& sol) {
  return std::clamp(bit_erasure_rate(model, sol) / model.epsilon(), 0.0, 1.0);
}

ModelAnalysis analyze_model(const DegreeModel& model,
                            const ThresholdOptions& options) {
  check_options(options);
  const BinomialEnsemble ens(model);
  const DeGrid grid(ens, options);
  ModelAnalysis out;
  out.solution = solve(grid, options);
  out.bit_erasure_rate = bit_erasure_rate_impl(grid, model, out.solution);
  out.prob_unlearned =
      std::clamp(out.bit_erasure_rate / model.epsilon(), 0.0, 1.0);
  return out;
}

}  // namespace scaling_lens
