#include "scaling_lens/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "scaling_lens/errors.hpp"
#include "scaling_lens/parallel.hpp"

namespace scaling_lens {
namespace {

constexpr std::uint64_t kExhaustiveLimit = 4096;

struct Eval {
  double objective = 0.0;
  double eps_star = 0.0;
  Regime regime = Regime::kWaterfall;
  double prob_unlearned = 0.0;
};

Eval evaluate(std::uint64_t R, std::uint64_t T, const BudgetSpec& spec) {
  const DegreeModel model(R, T, spec.d_t, spec.epsilon);
  const ModelAnalysis a = analyze_model(model);
  const double r = static_cast<double>(R);
  return {std::clamp(r * (1.0 - a.prob_unlearned), 0.0, r),
          a.solution.eps_star, a.solution.regime, a.prob_unlearned};
}

std::uint64_t texts_for(std::uint64_t R, double c_prime) {
  return static_cast<std::uint64_t>(std::floor(c_prime / static_cast<double>(R)));
}

OptimumPoint make_point(std::uint64_t R, const BudgetSpec& spec,
                        const Eval& e) {
  OptimumPoint p;
  p.R_star = R;
  p.T_star = texts_for(R, spec.reduced_budget());
  p.N_star = spec.varsigma * static_cast<double>(R);
  p.D_star = spec.tau * static_cast<double>(p.T_star);
  p.objective = e.objective;
  p.eps_star_at_opt = e.eps_star;
  p.regime_at_opt = e.regime;
  p.prob_unlearned = e.prob_unlearned;
  return p;
}

// Memoised objective over integer R; ties go to the smaller R.
class Objective {
 public:
  explicit Objective(const BudgetSpec& spec)
      : spec_(spec), c_prime_(spec.reduced_budget()),
        lo_(min_concepts(spec)), hi_(max_concepts(spec)) {}

  std::uint64_t clamp_r(double r) const {
    if (!(r > static_cast<double>(lo_))) return lo_;
    if (r >= static_cast<double>(hi_)) return hi_;
    return static_cast<std::uint64_t>(std::llround(r));
  }

  const Eval& at(std::uint64_t R) {
    auto it = cache_.find(R);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(R, evaluate(R, texts_for(R, c_prime_), spec_))
        .first->second;
  }

  void fill(const std::vector<std::uint64_t>& rs) {
    std::vector<std::uint64_t> todo;
    for (std::uint64_t r : rs) {
      if (!cache_.count(r)) todo.push_back(r);
    }
    std::vector<Eval> out(todo.size());
    parallel_for(todo.size(), [&](std::size_t i) {
      out[i] = evaluate(todo[i], texts_for(todo[i], c_prime_), spec_);
    });
    for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], out[i]);
  }

  std::uint64_t best() const {
    std::uint64_t arg = lo_;
    double val = -1.0;
    for (const auto& [r, e] : cache_) {
      if (e.objective > val) {
        val = e.objective;
        arg = r;
      }
    }
    return arg;
  }

  std::uint64_t lo() const { return lo_; }
  std::uint64_t hi() const { return hi_; }

 private:
  BudgetSpec spec_;
  double c_prime_;
  std::uint64_t lo_, hi_;
  std::map<std::uint64_t, Eval> cache_;
};

std::vector<std::uint64_t> geometric_rs(std::uint64_t lo, std::uint64_t hi,
                                        double per_decade) {
  std::vector<std::uint64_t> rs;
  const double u0 = std::log10(static_cast<double>(lo));
  const double u1 = std::log10(static_cast<double>(hi));
  const auto steps =
      static_cast<std::size_t>(std::ceil((u1 - u0) * per_decade));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double u = steps == 0 ? u0 : u0 + (u1 - u0) * static_cast<double>(i) /
                                                 static_cast<double>(steps);
    auto r = static_cast<std::uint64_t>(std::llround(std::pow(10.0, u)));
    r = std::clamp(r, lo, hi);
    if (rs.empty() || rs.back() != r) rs.push_back(r);
  }
  if (rs.back() != hi) rs.push_back(hi);
  return rs;
}

}  // namespace

double BudgetSpec::reduced_budget() const { return C / (6.0 * varsigma * tau); }

void BudgetSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw ValidationError("BudgetSpec: " + what);
  };
  if (!(C > 0.0) || !std::isfinite(C)) fail("C must be positive");
  if (!(varsigma > 0.0) || !std::isfinite(varsigma)) fail("varsigma must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) fail("tau must be positive");
  if (!(d_t > 0.0) || !std::isfinite(d_t)) fail("d_t must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0,1)");
  const double cp = reduced_budget();
  if (!(cp > 1.0)) {
    std::ostringstream msg;
    msg << "C' = C/(6 varsigma tau) = " << cp << " must exceed 1";
    fail(msg.str());
  }
  if (cp >= 1.8e19) fail("C' too large for 64-bit counts");
}

std::uint64_t min_concepts(const BudgetSpec& spec) {
  return static_cast<std::uint64_t>(std::floor(spec.d_t)) + 1;
}

std::uint64_t max_concepts(const BudgetSpec& spec) {
  return static_cast<std::uint64_t>(std::floor(spec.reduced_budget()));
}

double expected_learned(std::uint64_t R, std::uint64_t T,
                        const BudgetSpec& spec) {
  if (R == 0 || T == 0) throw ValidationError("expected_learned: R, T >= 1");
  return evaluate(R, T, spec).objective;
}

std::vector<IsoflopPoint> isoflop_curve(const BudgetSpec& spec,
                                        const RGrid& grid) {
  spec.validate();
  if (!(grid.points_per_decade > 0.0)) {
    throw ValidationError("isoflop_curve: points_per_decade must be positive");
  }
  std::uint64_t lo = min_concepts(spec);
  std::uint64_t hi = max_concepts(spec);
  if (grid.r_min > 0.0) {
    lo = std::max(lo, static_cast<std::uint64_t>(std::ceil(grid.r_min)));
  }
  if (grid.r_max > 0.0) {
    hi = std::min(hi, static_cast<std::uint64_t>(std::floor(grid.r_max)));
  }
  if (lo > hi) {
    std::ostringstream msg;
    msg << "isoflop_curve: no feasible R in [" << lo << ", " << hi << "]";
    throw EmptyGrid(msg.str());
  }
  const std::vector<std::uint64_t> rs =
      geometric_rs(lo, hi, grid.points_per_decade);
  const double cp = spec.reduced_budget();
  std::vector<IsoflopPoint> out(rs.size());
  parallel_for(rs.size(), [&](std::size_t i) {
    const std::uint64_t T = texts_for(rs[i], cp);
    const Eval e = evaluate(rs[i], T, spec);
    IsoflopPoint& pt = out[i];
    pt.C = spec.C;
    pt.R = rs[i];
    pt.T = T;
    pt.N = spec.varsigma * static_cast<double>(rs[i]);
    pt.D = spec.tau * static_cast<double>(T);
    pt.eps_star = e.eps_star;
    pt.regime = e.regime;
    pt.objective = e.objective;
  });
  return out;
}

OptimumPoint optimize_budget(const BudgetSpec& spec, double points_per_decade) {
  spec.validate();
  Objective obj(spec);
  if (obj.lo() > obj.hi()) {
    std::ostringstream msg;
    msg << "optimize_budget: no feasible R (need d_t < R <= C' = "
        << spec.reduced_budget() << ")";
    throw EmptyGrid(msg.str());
  }

  if (obj.hi() - obj.lo() < kExhaustiveLimit) {
    std::vector<std::uint64_t> all;
    for (std::uint64_t r = obj.lo(); r <= obj.hi(); ++r) all.push_back(r);
    obj.fill(all);
    const std::uint64_t r = obj.best();
    return make_point(r, spec, obj.at(r));
  }

  const std::vector<std::uint64_t> coarse =
      geometric_rs(obj.lo(), obj.hi(), points_per_decade);
  obj.fill(coarse);
  const std::uint64_t r0 = obj.best();
  const auto idx = static_cast<std::size_t>(
      std::lower_bound(coarse.begin(), coarse.end(), r0) - coarse.begin());
  double a = std::log(static_cast<double>(coarse[idx > 0 ? idx - 1 : 0]));
  double b = std::log(static_cast<double>(coarse[std::min(idx + 1, coarse.size() - 1)]));

  // Golden-section search for the maximum on log R.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto value = [&](double u) { return obj.at(obj.clamp_r(std::exp(u))).objective; };
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = value(c), fd = value(d);
  while (std::exp(b) - std::exp(a) > 2.0 && b - a > 1e-12) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = value(d);
    }
  }
  std::vector<std::uint64_t> last;
  for (auto r = obj.clamp_r(std::floor(std::exp(a))); r <= obj.clamp_r(std::ceil(std::exp(b))); ++r) {
    last.push_back(r);
  }
  obj.fill(last);
  const std::uint64_t r = obj.best();
  return make_point(r, spec, obj.at(r));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw InsufficientPoints("fit_line: need >= 2 paired points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientPoints("fit_line: x values are identical");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

ScalingFit scaling_exponents(std::span<const BudgetSpec> specs) {
  if (specs.size() < 5) {
    throw InsufficientPoints("scaling_exponents: need at least 5 budgets");
  }
  ScalingFit fit;
  std::vector<double> lc, ln, ld;
  for (const BudgetSpec& s : specs) {
    fit.optima.push_back(optimize_budget(s));
    lc.push_back(std::log(s.C));
    ln.push_back(std::log(fit.optima.back().N_star));
    ld.push_back(std::log(fit.optima.back().D_star));
  }
  const LineFit fa = fit_line(lc, ln);
  const LineFit fb = fit_line(lc, ld);
  fit.a = fa.slope;
  fit.b = fb.slope;
  fit.r2 = std::min(fa.r2, fb.r2);
  return fit;
}

std::vector<BudgetSpec> budget_sweep(const BudgetSpec& base, double c_lo,
                                     double c_hi, std::size_t count) {
  if (!(c_lo > 0.0) || !(c_hi >= c_lo) || count == 0) {
    throw ValidationError("budget_sweep: need 0 < c_lo <= c_hi and count >= 1");
  }
  std::vector<BudgetSpec> out;
  const double u0 = std::log10(c_lo), u1 = std::log10(c_hi);
  for (std::size_t i = 0; i < count; ++i) {
    BudgetSpec s = base;
    s.C = count == 1 ? c_lo
                     : std::pow(10.0, u0 + (u1 - u0) * static_cast<double>(i) /
                                          static_cast<double>(count - 1));
    out.push_back(s);
  }
  return out;
}

}  // namespace scaling_lens
