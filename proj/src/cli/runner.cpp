#include "scaling_lens/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "scaling_lens/emergence.hpp"
#include "scaling_lens/errors.hpp"
#include "scaling_lens/loss.hpp"
#include "scaling_lens/optimizer.hpp"
#include "scaling_lens/parallel.hpp"
#include "scaling_lens/peeling.hpp"
#include "scaling_lens/rng.hpp"
#include "scaling_lens/threshold.hpp"

#ifndef SCALING_LENS_VERSION
#define SCALING_LENS_VERSION "0.0.0"
#endif

namespace scaling_lens::cli {
namespace {

using nlohmann::ordered_json;

std::string regime_name(Regime r) { return std::string(to_string(r)); }

BudgetSpec base_spec(const Config& cfg) {
  BudgetSpec s;
  s.varsigma = cfg.get_double("varsigma");
  s.tau = cfg.get_double("tau");
  s.d_t = cfg.get_double("d_t");
  s.epsilon = cfg.get_double("epsilon");
  if (!(s.d_t > 0.0)) cfg.fail("d_t", "must be positive");
  if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) cfg.fail("epsilon", "must lie in (0,1)");
  if (!(s.varsigma > 0.0)) cfg.fail("varsigma", "must be positive");
  if (!(s.tau > 0.0)) cfg.fail("tau", "must be positive");
  return s;
}

std::vector<BudgetSpec> sweep_specs(const Config& cfg) {
  const BudgetSpec base = base_spec(cfg);
  const double lo = cfg.get_double("C_min");
  const double hi = cfg.get_double("C_max");
  const std::uint64_t n = cfg.get_u64("budgets");
  if (!(lo > 0.0)) cfg.fail("C_min", "must be positive");
  if (!(hi >= lo)) cfg.fail("C_max", "must be >= C_min");
  if (n == 0) cfg.fail("budgets", "must be >= 1");
  if (n > 1 && hi == lo) cfg.fail("C_max", "must exceed C_min for several budgets");
  auto specs = budget_sweep(base, lo, hi, n);
  for (const BudgetSpec& s : specs) {
    if (!(s.reduced_budget() > 1.0)) {
      cfg.fail("C_min", "C' = C/(6 varsigma tau) must exceed 1 for every budget");
    }
  }
  return specs;
}

double points_per_decade(const Config& cfg) {
  const double ppd = cfg.get_double("points_per_decade");
  if (!(ppd > 0.0)) cfg.fail("points_per_decade", "must be positive");
  return ppd;
}

std::vector<OptimumPoint> optima_for(const std::vector<BudgetSpec>& specs,
                                     double ppd) {
  std::vector<OptimumPoint> out;
  for (const BudgetSpec& s : specs) out.push_back(optimize_budget(s, ppd));
  return out;
}

CommandOutput run_threshold(const Config& cfg) {
  const auto Rs = cfg.get_u64s("R");
  const auto Ts = cfg.get_u64s("T");
  const double d_t = cfg.get_double("d_t");
  const double eps = cfg.get_double("epsilon");
  const std::string mode_s = cfg.get_string("eval_mode");
  EvalMode mode = EvalMode::kExactLog;
  if (mode_s == "poisson_limit") {
    mode = EvalMode::kPoissonLimit;
  } else if (mode_s != "exact_log") {
    cfg.fail("eval_mode", "expected exact_log or poisson_limit");
  }
  ThresholdOptions opts;
  opts.eps_lo = cfg.get_double("eps_lo");
  opts.eps_hi = cfg.get_double("eps_hi");
  opts.tol = cfg.get_double("tol");
  if (!(opts.eps_lo >= 0.0 && opts.eps_lo < opts.eps_hi && opts.eps_hi <= 1.0)) {
    cfg.fail("eps_hi", "need 0 <= eps_lo < eps_hi <= 1");
  }
  if (!(opts.tol > 0.0)) cfg.fail("tol", "must be positive");

  std::vector<DegreeModel> models;
  for (std::uint64_t R : Rs) {
    for (std::uint64_t T : Ts) models.emplace_back(R, T, d_t, eps, mode);
  }
  std::vector<ModelAnalysis> res(models.size());
  parallel_for(models.size(), [&](std::size_t i) { res[i] = analyze_model(models[i], opts); });

  CommandOutput out;
  out.data.columns = {"R", "T", "d_t", "epsilon", "p", "d_r", "regime",
                      "eps_star", "x_star", "nu_star", "alpha",
                      "matching_upper_bound", "P_b", "prob_unlearned"};
  for (std::size_t i = 0; i < models.size(); ++i) {
    const DegreeModel& m = models[i];
    const ThresholdSolution& s = res[i].solution;
    out.data.add({m.concepts(), m.texts(), d_t, eps, m.edge_probability(),
                  m.concept_degree(), regime_name(s.regime), s.eps_star,
                  s.x_star, s.nu_star, s.alpha, matching_upper_bound(m),
                  res[i].bit_erasure_rate, res[i].prob_unlearned});
    std::ostringstream tag;
    tag << "R=" << m.concepts() << " T=" << m.texts();
    if (s.regime == Regime::kAlwaysDecodes) {
      out.warnings.push_back(tag.str() + ": no transition up to eps_hi; eps_star is the eps_hi sentinel");
    } else if (s.regime == Regime::kContinuous) {
      out.warnings.push_back(tag.str() + ": no waterfall; eps_star is the eps_lo sentinel");
    }
    if (s.tied_maxima) out.warnings.push_back(tag.str() + ": tied maxima, largest x taken");
  }
  return out;
}

CommandOutput run_peel_sim(const Config& cfg) {
  const std::string mode = cfg.get_string("mode");
  const std::uint64_t R = cfg.get_u64("R");
  const auto Ts = cfg.get_u64s("T");
  const double d_t = cfg.get_double("d_t");
  const double eps = cfg.get_double("epsilon");
  const std::uint64_t trials = cfg.get_u64("trials");
  const std::uint64_t seed = cfg.get_u64("seed");
  if (trials == 0) cfg.fail("trials", "must be >= 1");
  if (R == 0) cfg.fail("R", "must be >= 1");
  if (!(d_t > 0.0 && d_t < static_cast<double>(R))) cfg.fail("d_t", "need 0 < d_t < R");

  CommandOutput out;
  if (mode == "parent") {
    out.data.columns = {"R", "T", "d_t", "epsilon", "parent_concepts", "trials",
                        "regime", "eps_star", "pb_predicted", "pb_mean",
                        "pb_stderr", "unlearned_mean", "unlearned_stderr"};
    for (std::size_t j = 0; j < Ts.size(); ++j) {
      const DegreeModel model(R, Ts[j], d_t, eps);
      const ModelAnalysis a = analyze_model(model);
      const ErasureEstimate e =
          mc_parent_graph_erasure(model, trials, stream_seed(seed, j));
      out.data.add({R, Ts[j], d_t, eps,
                    static_cast<std::uint64_t>(std::ceil(model.parent_concepts())),
                    trials, regime_name(a.solution.regime), a.solution.eps_star,
                    a.bit_erasure_rate, e.pb_mean, e.pb_stderr, e.unlearned_mean,
                    e.unlearned_stderr});
    }
  } else if (mode == "learned") {
    out.data.columns = {"R", "T", "d_t", "trials", "learned_mean",
                        "learned_stderr", "learned_predicted"};
    for (std::size_t j = 0; j < Ts.size(); ++j) {
      const McEstimate e = mc_expected_learned(R, Ts[j], d_t, trials, stream_seed(seed, j));
      double predicted = 0.0;
      if (Ts[j] > 0) {
        const ModelAnalysis a = analyze_model(DegreeModel(R, Ts[j], d_t, eps));
        predicted = static_cast<double>(R) * (1.0 - a.prob_unlearned);
      }
      out.data.add({R, Ts[j], d_t, trials, e.mean, e.std_error, predicted});
    }
  } else if (mode == "graphs") {
    out.data.columns = {"T", "trial", "seed", "edges", "learned", "unlearned",
                        "iterations", "learned_ids"};
    const std::string dump = cfg.get_string("dump_graph");
    for (std::size_t j = 0; j < Ts.size(); ++j) {
      const std::uint64_t T = Ts[j];
      std::vector<std::vector<Cell>> rows(trials);
      parallel_for(trials, [&](std::size_t i) {
        const std::uint64_t s = stream_seed(stream_seed(seed, j), i);
        const BipartiteGraph g = sample_graph(R, T, d_t / static_cast<double>(R), s);
        const PeelingOutcome o = peel(g);
        std::string ids;
        for (std::uint32_t c : o.learned) {
          if (!ids.empty()) ids += ' ';
          ids += std::to_string(c);
        }
        rows[i] = {T, static_cast<std::uint64_t>(i), s, g.edge_count(),
                   static_cast<std::uint64_t>(o.learned.size()), o.unlearned_count,
                   o.iterations, ids};
      });
      for (auto& r : rows) out.data.add(std::move(r));
    }
    if (!dump.empty()) {
      const BipartiteGraph g = sample_graph(R, Ts[0], d_t / static_cast<double>(R),
                                            stream_seed(stream_seed(seed, 0), 0));
      std::ofstream f(dump);
      if (!f) cfg.fail("dump_graph", "cannot open for writing");
      write_graph_dump(f, g);
      out.meta["graph_dump"] = dump;
    }
  } else {
    cfg.fail("mode", "expected parent, learned or graphs");
  }
  return out;
}

CommandOutput run_isoflop(const Config& cfg) {
  const BudgetSpec base = base_spec(cfg);
  RGrid grid;
  grid.points_per_decade = points_per_decade(cfg);
  grid.r_min = cfg.get_double("R_min");
  grid.r_max = cfg.get_double("R_max");
  CommandOutput out;
  out.data.columns = {"C", "R", "T", "N", "D", "eps_star", "objective"};
  ordered_json optima = ordered_json::array();
  for (double C : cfg.get_doubles("C")) {
    BudgetSpec s = base;
    s.C = C;
    try {
      s.validate();
    } catch (const ValidationError& e) {
      cfg.fail("C", e.what());
    }
    for (const IsoflopPoint& p : isoflop_curve(s, grid)) {
      out.data.add({p.C, p.R, p.T, p.N, p.D, p.eps_star, p.objective});
    }
    const OptimumPoint o = optimize_budget(s, grid.points_per_decade);
    optima.push_back({{"C", C}, {"R_star", o.R_star}, {"T_star", o.T_star},
                      {"objective", o.objective}, {"eps_star", o.eps_star_at_opt}});
  }
  out.meta["optima"] = optima;
  return out;
}

CommandOutput run_frontier(const Config& cfg) {
  const auto specs = sweep_specs(cfg);
  const auto optima = optima_for(specs, points_per_decade(cfg));
  CommandOutput out;
  out.data.columns = {"C", "R_star", "T_star", "N_star", "D_star", "objective"};
  std::vector<double> lc, ln, ld;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const OptimumPoint& o = optima[i];
    out.data.add({specs[i].C, o.R_star, o.T_star, o.N_star, o.D_star, o.objective});
    lc.push_back(std::log(specs[i].C));
    ln.push_back(std::log(o.N_star));
    ld.push_back(std::log(o.D_star));
  }
  if (specs.size() >= 5) {
    const LineFit a = fit_line(lc, ln);
    const LineFit b = fit_line(lc, ld);
    Table slopes;
    slopes.columns = {"budgets", "a", "b", "a_plus_b", "r2_a", "r2_b"};
    slopes.add({static_cast<std::uint64_t>(specs.size()), a.slope, b.slope,
                a.slope + b.slope, a.r2, b.r2});
    out.side_tables["slopes"] = std::move(slopes);
  } else {
    out.warnings.push_back("fewer than 5 budgets; slopes not fitted");
  }
  return out;
}

CommandOutput run_loss(const Config& cfg) {
  const auto specs = sweep_specs(cfg);
  const auto optima = optima_for(specs, points_per_decade(cfg));
  const auto points = frontier_loss_curve(specs, optima);
  CommandOutput out;
  out.data.columns = {"C", "N_star", "P_b", "P_e_train_exact", "excess_entropy_lb"};
  ordered_json approx = ordered_json::array();
  for (const LossPoint& p : points) {
    out.data.add({p.C, p.N_star, p.P_b, p.P_e_train_exact, p.excess_entropy_lb});
    approx.push_back(p.P_e_train_approx);
  }
  out.meta["constant_discrepancy"] = {
      {"flag", true},
      {"exact_series_constant", kSeriesConstant},
      {"approximation_constant", kApproxConstant},
      {"ratio", kApproxConstant / kSeriesConstant},
      {"note", "P_e_train_exact expands to 0.5 d_t^2 P_b^2; the quadratic "
               "approximation 4 d_t^2 P_b^2 is reported here only"},
      {"P_e_train_approx", approx}};
  out.warnings.push_back(
      "constant discrepancy: exact training error ~ 0.5 d_t^2 P_b^2, "
      "quadratic approximation uses 4 d_t^2 P_b^2 (factor 8)");
  return out;
}

TaskSpec task_from(const Config& cfg, std::size_t L) {
  const std::string kind = cfg.get_string("task");
  if (kind == "homogeneous") {
    const std::uint64_t l = cfg.get_u64("task_level");
    const std::uint64_t m = cfg.get_u64("task_arity");
    if (l < 1 || l > L) cfg.fail("task_level", "must lie in [1, levels]");
    if (m < 1) cfg.fail("task_arity", "must be >= 1");
    return TaskSpec::homogeneous(l, static_cast<unsigned>(m));
  }
  const std::uint64_t lo = cfg.get_u64("arity_min");
  const std::uint64_t hi = cfg.get_u64("arity_max");
  if (lo < 1 || hi < lo) cfg.fail("arity_max", "need 1 <= arity_min <= arity_max");
  const auto qm = uniform_arity(static_cast<unsigned>(lo), static_cast<unsigned>(hi));
  std::vector<double> ql;
  if (kind == "binomial") {
    const double pi = cfg.get_double("pi");
    if (!(pi > 0.0 && pi < 1.0)) cfg.fail("pi", "must lie in (0,1)");
    ql = task_mixture_binomial(L, pi);
  } else if (kind == "mixture") {
    const auto w = cfg.get_doubles("mixture_weights");
    const auto p = cfg.get_doubles("mixture_pis");
    if (w.size() != p.size()) cfg.fail("mixture_pis", "needs one entry per weight");
    for (double v : p) {
      if (!(v > 0.0 && v < 1.0)) cfg.fail("mixture_pis", "entries must lie in (0,1)");
    }
    for (double v : w) {
      if (!(v >= 0.0)) cfg.fail("mixture_weights", "entries must be nonnegative");
    }
    ql = task_mixture_binomial(L, w, p);
  } else {
    cfg.fail("task", "expected homogeneous, binomial or mixture");
  }
  TaskSpec t = TaskSpec::product(ql, qm);
  // Renormalise away rounding from the outer product.
  double total = 0.0;
  for (const TaskTerm& term : t.terms) total += term.weight;
  for (TaskTerm& term : t.terms) term.weight /= total;
  return t;
}

CommandOutput run_emergence(const Config& cfg) {
  const auto specs = sweep_specs(cfg);
  const std::uint64_t L = cfg.get_u64("levels");
  const std::uint64_t S = cfg.get_u64("skills");
  if (L < 1) cfg.fail("levels", "must be >= 1");
  if (S < 2) cfg.fail("skills", "must be >= 2");
  const SkillHierarchy h = SkillHierarchy::exponential(L, S, cfg.get_double("eta_scale"));
  const TaskSpec task = task_from(cfg, L);
  const double slope_tol = cfg.get_double("slope_tol");
  const double min_width = cfg.get_double("min_width");
  if (!(slope_tol > 0.0)) cfg.fail("slope_tol", "must be positive");
  if (!(min_width >= 0.0)) cfg.fail("min_width", "must be nonnegative");
  const bool dump_levels = cfg.get_bool("dump_levels");

  const auto optima = optima_for(specs, points_per_decade(cfg));
  const EmergenceCurve curve = accuracy_vs_compute(specs, optima, h, task);

  CommandOutput out;
  out.data.columns = {"C", "N_star", "accuracy_lower_bound"};
  std::size_t below = 0, degenerate = 0;
  Table levels;
  levels.columns = {"C", "l", "p_rr", "p_l", "mean_degree", "gamma_l"};
  for (const EmergencePoint& p : curve.points) {
    out.data.add({p.C, p.N_star, p.accuracy});
    below += p.concepts_below_skills ? 1 : 0;
    degenerate += p.degenerate_bound ? 1 : 0;
    if (dump_levels) {
      for (std::size_t l = 0; l < p.levels.size(); ++l) {
        const LevelState& s = p.levels[l];
        levels.add({p.C, static_cast<std::uint64_t>(l + 1), s.p_rr, s.p_l,
                    s.mean_degree, s.gamma});
      }
    }
  }
  if (below) {
    out.warnings.push_back(std::to_string(below) +
                           " budget(s) with R* < S; pair probabilities assume R >= S");
  }
  if (degenerate) {
    out.warnings.push_back(std::to_string(degenerate) +
                           " budget(s) with eta_l >= binom(R,2); link probability set to 0");
  }
  if (curve.points.size() >= 8) {
    const auto segs = detect_plateaus(curve, slope_tol, min_width);
    Table plateaus;
    plateaus.columns = {"kind", "log10_C_begin", "log10_C_end", "accuracy_begin",
                        "accuracy_end"};
    for (const Segment& s : segs) {
      plateaus.add({std::string(to_string(s.kind)), s.log10_c_begin, s.log10_c_end,
                    s.accuracy_begin, s.accuracy_end});
    }
    out.side_tables["plateaus"] = std::move(plateaus);
    out.meta["interior_plateaus"] = interior_plateaus(segs);
    out.meta["rises"] = rise_count(segs);
  } else {
    out.warnings.push_back("fewer than 8 budgets; plateau detection skipped");
  }
  if (dump_levels) out.side_tables["levels"] = std::move(levels);
  return out;
}

CommandOutput run_plateaus(const Config& cfg) {
  const std::string path = cfg.get_string("curve");
  std::ifstream in(path);
  if (!in) cfg.fail("curve", "cannot open");
  const Table t = read_csv(in);
  auto col = [&](const std::vector<std::string>& names) -> std::size_t {
    for (const std::string& n : names) {
      auto it = std::find(t.columns.begin(), t.columns.end(), n);
      if (it != t.columns.end()) return static_cast<std::size_t>(it - t.columns.begin());
    }
    cfg.fail("curve", "missing column " + names.front());
  };
  const std::size_t ci = col({"C"});
  const std::size_t ai = col({"accuracy_lower_bound", "accuracy"});
  std::vector<double> lc, acc;
  for (const auto& row : t.rows) {
    const double c = std::strtod(std::get<std::string>(row[ci]).c_str(), nullptr);
    if (!(c > 0.0)) cfg.fail("curve", "C values must be positive");
    lc.push_back(std::log10(c));
    acc.push_back(std::strtod(std::get<std::string>(row[ai]).c_str(), nullptr));
  }
  const double slope_tol = cfg.get_double("slope_tol");
  const double min_width = cfg.get_double("min_width");
  if (!(slope_tol > 0.0)) cfg.fail("slope_tol", "must be positive");
  if (!(min_width >= 0.0)) cfg.fail("min_width", "must be nonnegative");
  const auto segs = detect_plateaus(lc, acc, slope_tol, min_width);
  CommandOutput out;
  out.data.columns = {"kind", "log10_C_begin", "log10_C_end", "accuracy_begin",
                      "accuracy_end"};
  for (const Segment& s : segs) {
    out.data.add({std::string(to_string(s.kind)), s.log10_c_begin, s.log10_c_end,
                  s.accuracy_begin, s.accuracy_end});
  }
  out.meta["interior_plateaus"] = interior_plateaus(segs);
  out.meta["rises"] = rise_count(segs);
  return out;
}

void write_table(const std::string& path, const Table& t, const std::string& format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path + " for writing");
  if (format == "json") {
    f << to_json(t).dump(2) << '\n';
  } else {
    write_csv(f, t);
  }
}

}  // namespace

std::string version() { return SCALING_LENS_VERSION; }

CommandOutput execute(const Config& cfg) {
  const std::string& c = cfg.command();
  if (c == "threshold") return run_threshold(cfg);
  if (c == "peel-sim") return run_peel_sim(cfg);
  if (c == "isoflop") return run_isoflop(cfg);
  if (c == "frontier") return run_frontier(cfg);
  if (c == "loss") return run_loss(cfg);
  if (c == "emergence") return run_emergence(cfg);
  if (c == "plateaus") return run_plateaus(cfg);
  throw ValidationError("unknown command '" + c + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concept-learning scaling experiments", "scaling-lens"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::map<std::string, std::string> overrides;
  };
  std::map<std::string, Flags> flags;
  std::map<std::string, std::string> raw;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    Flags& f = flags[name];
    sub->add_option("--config", f.config, "key = value config file");
    for (const char* key : {"seed", "trials", "out", "format", "threads"}) {
      sub->add_option(std::string("--") + key, raw[name + "/" + key], key);
    }
    std::string keys = "\nConfig keys:\n";
    for (const KeySpec& k : command_keys(name)) {
      keys += "  " + k.name + (k.default_value.empty() ? "" : " [" + k.default_value + "]") +
              "  " + k.help + "\n";
    }
    sub->footer(keys);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string command;
  for (CLI::App* sub : app.get_subcommands()) command = sub->get_name();

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Config> cfg;
  try {
    const Flags& f = flags[command];
    std::map<std::string, ConfigValue> file_values;
    const std::string source = f.config.empty() ? "<defaults>" : f.config;
    if (!f.config.empty()) file_values = parse_config_file(f.config);
    std::map<std::string, std::string> overrides;
    for (const char* key : {"seed", "trials", "out", "format", "threads"}) {
      auto* opt = app.get_subcommand(command)->get_option(std::string("--") + key);
      if (opt->count() > 0) overrides[key] = raw[command + "/" + key];
    }
    auto values = file_values;
    if (!values.count("threads") && !overrides.count("threads")) {
      if (const char* env = std::getenv("SCALING_LENS_THREADS")) {
        values["threads"] = ConfigValue{env, 0, "env"};
      }
    }
    cfg.emplace(resolve_config(command, source, values, overrides));
    const std::string format = cfg->get_string("format");
    if (format != "csv" && format != "json") cfg->fail("format", "expected csv or json");
    const std::uint64_t threads = cfg->get_u64("threads");
    if (threads > 4096) cfg->fail("threads", "must be <= 4096");
    set_max_threads(static_cast<unsigned>(threads));
    cfg->get_u64("seed");

    CommandOutput result = execute(*cfg);

    std::string path = cfg->get_string("out");
    if (path.empty()) path = command + "." + format;
    // Render everything first so a late failure leaves no files behind.
    std::vector<std::pair<std::string, const Table*>> files{{path, &result.data}};
    for (const auto& [suffix, table] : result.side_tables) {
      files.emplace_back(path + "." + suffix + "." + format, &table);
    }
    for (const auto& [p, t] : files) {
      if (format == "json") {
        to_json(*t);
      } else {
        to_csv(*t);
      }
    }
    for (const auto& [p, t] : files) write_table(p, *t, format);

    ordered_json meta;
    meta["artifact"] = "scaling-lens";
    meta["version"] = version();
    meta["command"] = command;
    meta["seed"] = cfg->get_u64("seed");
    meta["threads"] = max_threads();
    ordered_json resolved = ordered_json::object();
    for (const auto& [k, v] : cfg->values()) {
      resolved[k] = {{"value", v.text}, {"origin", v.origin}};
    }
    meta["config"] = resolved;
    meta["config_source"] = f.config;
    meta["outputs"] = ordered_json::array();
    for (const auto& [p, t] : files) meta["outputs"].push_back(p);
    meta["warnings"] = result.warnings;
    for (auto& [k, v] : result.meta.items()) meta[k] = v;
    meta["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream mf(path + ".meta.json", std::ios::binary);
    if (!mf) throw ValidationError("cannot open " + path + ".meta.json for writing");
    mf << meta.dump(2) << '\n';
    for (const std::string& w : result.warnings) err << "warning: " << w << '\n';
    out << "wrote " << path << " (" << result.data.rows.size() << " rows)\n";
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    if (cfg) {
      err << "parameters:";
      for (const auto& [k, v] : cfg->values()) {
        if (v.origin != "default") err << ' ' << k << '=' << v.text;
      }
      err << '\n';
    }
    return 2;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace scaling_lens::cli
