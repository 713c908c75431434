// SPDX-License-Identifier: Apache-2.0

#include "sirm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "sirm/cavity.hpp"
#include "sirm/csv.hpp"
#include "sirm/integrate.hpp"
#include "sirm/models.hpp"
#include "sirm/sirm.hpp"

namespace sirm
{

namespace
{

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class Method
{
  Full,
  Coarse,
  Sirm,
  LocalSirm,
  Dirm,
};

Method parse_method(const std::string &s)
{
  if (s == "full")
    return Method::Full;
  if (s == "coarse")
    return Method::Coarse;
  if (s == "sirm")
    return Method::Sirm;
  if (s == "local_sirm")
    return Method::LocalSirm;
  if (s == "dirm")
    return Method::Dirm;
  throw ConfigError("unknown method '" + s + "' (full, coarse, sirm, local_sirm, dirm)");
}

const char *method_name(Method m)
{
  switch (m) {
    case Method::Full: return "full";
    case Method::Coarse: return "coarse";
    case Method::Sirm: return "sirm";
    case Method::LocalSirm: return "local_sirm";
    case Method::Dirm: return "dirm";
  }
  return "?";
}

// Fixed results.csv schema; every row carries the full parameter set so it
// can be re-run from its own columns.
const std::vector<std::string> &columns()
{
  static const std::vector<std::string> cols = {
      "run", "status", "experiment", "method", "family", "grid", "viscosity", "speed",
      "reynolds", "lid_speed", "t_start", "t_end", "dt", "record_every", "snapshots",
      "gamma", "eta", "k_min", "k_max", "epsilon", "max_iterations", "reduced_dt",
      "ensemble", "trial", "coarse_points", "coarse_factor", "coarse_dt", "fourier_modes",
      "subintervals", "m_prime", "basis", "dirm_blocks", "dirm_modes_per_block", "seed",
      "k_final", "iterations", "converged", "sup_error", "final_error",
      "truncation_estimate", "wall_time_s", "convergence_csv"};
  return cols;
}

class Row
{
public:
  void set(const std::string &key, const std::string &value)
  {
    const auto &cols = columns();
    if (std::find(cols.begin(), cols.end(), key) == cols.end())
      throw std::logic_error("Row: unknown column " + key);
    values_[key] = value;
  }
  void set(const std::string &key, double v) { set(key, csv_number(v)); }
  void set(const std::string &key, int v) { set(key, std::to_string(v)); }

  std::string line() const
  {
    std::string out;
    bool first = true;
    for (const auto &c : columns()) {
      if (!first)
        out += ',';
      first = false;
      const auto it = values_.find(c);
      if (it != values_.end())
        out += it->second;
    }
    return out;
  }

private:
  std::map<std::string, std::string> values_;
};

// Error text goes into a CSV cell; strip the characters that would break it.
std::string sanitize(std::string msg)
{
  for (char &c : msg)
    if (c == ',' || c == '\n' || c == '\r' || c == '"')
      c = ' ';
  return msg;
}

std::string family_name(const ModelSpec &spec)
{
  if (std::holds_alternative<AdvDiffSpec>(spec))
    return "adv_diff";
  if (std::holds_alternative<BurgersSpec>(spec))
    return "burgers";
  return "cavity";
}

int grid_size(const ModelSpec &spec)
{
  if (const auto *cs = std::get_if<CavitySpec>(&spec))
    return cs->n_side;
  return model_dim(spec);
}

ModelSpec base_spec(const ConfigFile &cfg)
{
  const std::string family = cfg.get_string("model", "family");
  if (family == "adv_diff") {
    AdvDiffSpec s;
    s.grid.n_points = cfg.get_int("model", "n");
    s.grid.domain_length = cfg.get_double("model", "length", 1.0);
    s.speed = cfg.get_double("model", "speed", 0.5);
    s.viscosity = cfg.get_double("model", "viscosity", 1e-3);
    s.grid.validate();
    return s;
  }
  if (family == "burgers") {
    BurgersSpec s;
    s.grid.n_points = cfg.get_int("model", "n");
    s.grid.domain_length = cfg.get_double("model", "length", 1.0);
    s.viscosity = cfg.get_double("model", "viscosity", 1e-3);
    s.grid.validate();
    return s;
  }
  if (family == "cavity") {
    CavitySpec s;
    s.n_side = cfg.get_int("model", "side");
    s.reynolds = cfg.get_double("model", "reynolds", 1000.0);
    s.lid_speed = cfg.get_double("model", "lid_speed", 1.0);
    s.validate();
    return s;
  }
  throw ConfigError("unknown model family '" + family + "' (adv_diff, burgers, cavity)");
}

ModelSpec spec_with_viscosity(const ModelSpec &spec, double nu)
{
  return std::visit(
      [nu](const auto &s) -> ModelSpec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CavitySpec>) {
          throw ConfigError("viscosity sweeps apply to the 1D families only");
        } else {
          auto out = s;
          out.viscosity = nu;
          return out;
        }
      },
      spec);
}

IntegratorConfig integ_from(const ConfigFile &cfg)
{
  IntegratorConfig integ;
  integ.t_start = cfg.get_double("time", "t_start", 0.0);
  integ.t_end = cfg.get_double("time", "t_end");
  integ.dt = cfg.get_double("time", "dt");
  integ.record_every = cfg.get_int("time", "record_every", 1);
  integ.validate();
  return integ;
}

// One sweep point with every axis value resolved.
struct RunPoint
{
  Method method = Method::Full;
  ModelSpec spec;
  double eta = 0.0;
  int k0 = 0;           // explicit coarse size; 0 keeps the [trial] settings
  std::string m_rule;   // "", "mNNN" (target total samples) or "MNNN" (subintervals)
  int m_prime = 0;      // 0 keeps the [local] default
  int dirm_modes = 0;   // 0 keeps the [dirm] default
};

int nearest_divisor(int steps, double target)
{
  int best = 1;
  double gap = std::abs(target - 1.0);
  for (int d = 2; d <= steps; ++d) {
    if (steps % d != 0)
      continue;
    const double g = std::abs(target - d);
    if (g < gap) {
      gap = g;
      best = d;
    }
  }
  return best;
}

// Subinterval count for a partitioned run: either the configured M, an "MNNN"
// override, or the best divisor approximating a target total sample count
// "mNNN" through m = (m' - 1) M + 1.
int resolve_subintervals(const std::string &m_rule, int m_prime, int steps, int fallback)
{
  if (m_rule.empty())
    return fallback;
  if (m_rule.size() < 2 || (m_rule[0] != 'm' && m_rule[0] != 'M'))
    throw ConfigError("sweep m_rule entries look like m500 (total samples) or M250 "
                      "(subintervals), got '" + m_rule + "'");
  const int value = std::atoi(m_rule.c_str() + 1);
  if (value < 1)
    throw ConfigError("bad m_rule value in '" + m_rule + "'");
  if (m_rule[0] == 'M')
    return nearest_divisor(steps, value);
  const double target = static_cast<double>(value - 1) / std::max(1, m_prime - 1);
  return nearest_divisor(steps, target);
}

TrialSpec trial_from(const ConfigFile &cfg, const ModelSpec &spec, int k0)
{
  TrialSpec trial;
  const std::string kind = cfg.get_string("trial", "kind", "constant");
  if (kind == "constant")
    trial.kind = TrialKind::ConstantState;
  else if (kind == "coarse")
    trial.kind = TrialKind::CoarseModel;
  else
    throw ConfigError("unknown trial kind '" + kind + "' (constant, coarse)");
  trial.model_spec = spec;
  trial.coarse_factor = cfg.get_int("trial", "coarse_factor", 1);
  trial.coarse_points = cfg.get_int("trial", "coarse_points", 0);
  trial.coarse_dt = cfg.get_double("trial", "coarse_dt", 0.0);
  trial.fourier_modes = cfg.get_int("trial", "fourier_modes", 0);
  if (k0 > 0) {
    trial.kind = TrialKind::CoarseModel;
    trial.coarse_points = k0;
  }
  return trial;
}

SirmConfig sirm_from(const ConfigFile &cfg, const ModelSpec &spec, double eta, int k0)
{
  SirmConfig sc;
  sc.snapshot_count = cfg.get_int("sirm", "snapshots", 51);
  sc.gamma = cfg.get_double("sirm", "gamma", 1.0);
  sc.criterion.eta = eta;
  sc.criterion.k_min = cfg.get_int("sirm", "k_min", 1);
  sc.criterion.k_max = cfg.get_int("sirm", "k_max", 0);
  sc.epsilon = cfg.get_double("sirm", "epsilon", 1e-4);
  sc.max_iterations = cfg.get_int("sirm", "max_iterations", 10);
  sc.reduced_dt = cfg.get_double("sirm", "reduced_dt", 0.0);
  const std::string form = cfg.get_string("sirm", "ensemble", "extended");
  if (form == "extended")
    sc.ensemble_form = EnsembleForm::Extended;
  else if (form == "tangent_only")
    sc.ensemble_form = EnsembleForm::TangentOnly;
  else
    throw ConfigError("unknown ensemble form '" + form + "' (extended, tangent_only)");
  sc.trial = trial_from(cfg, spec, k0);
  sc.error_scale = norm_weight(spec);
  return sc;
}

LocalConfig local_from(const ConfigFile &cfg, const ModelSpec &spec, int m_prime,
                       int subintervals)
{
  LocalConfig lc;
  lc.subintervals = subintervals;
  lc.m_prime = m_prime > 0 ? m_prime : cfg.get_int("local", "m_prime", 3);
  const std::string strategy = cfg.get_string("local", "trial", "time_history");
  if (strategy == "constant")
    lc.trial_strategy = LocalTrialStrategy::Constant;
  else if (strategy == "coarse")
    lc.trial_strategy = LocalTrialStrategy::CoarseModel;
  else if (strategy == "time_history")
    lc.trial_strategy = LocalTrialStrategy::TimeHistory;
  else
    throw ConfigError("unknown local trial '" + strategy +
                      "' (constant, coarse, time_history)");
  const std::string basis = cfg.get_string("local", "basis", "gram_schmidt");
  if (basis == "gram_schmidt")
    lc.basis_method = BasisMethod::GramSchmidt;
  else if (basis == "pod")
    lc.basis_method = BasisMethod::Pod;
  else
    throw ConfigError("unknown local basis '" + basis + "' (gram_schmidt, pod)");
  lc.gamma = cfg.get_double("local", "gamma", 1.0);
  lc.epsilon = cfg.get_double("local", "epsilon", 1e-4);
  lc.max_iterations = cfg.get_int("local", "max_iterations", 10);
  lc.criterion.eta = cfg.get_double("local", "eta", 1e-8);
  lc.gs_drop_tol = cfg.get_double("local", "gs_drop_tol", 1e-10);
  lc.model_spec = spec;
  lc.coarse_factor = cfg.get_int("local", "coarse_factor", 2);
  lc.coarse_dt = cfg.get_double("local", "coarse_dt", 0.0);
  lc.fourier_modes = cfg.get_int("local", "fourier_modes", 0);
  return lc;
}

std::vector<double> record_times(const IntegratorConfig &integ)
{
  const int steps = integ.step_count();
  std::vector<double> t;
  for (int s = 0; s <= steps; ++s)
    if (s % integ.record_every == 0 || s == steps)
      t.push_back(integ.t_start + s * integ.dt);
  return t;
}

void write_centerlines(const fs::path &dir, const CavitySpec &spec, const Vector &state)
{
  const Vector u = centerline_u(state, spec);
  const Vector v = centerline_v(state, spec);
  {
    std::ofstream out(dir / "centerline_u.csv");
    out << "y,u\n";
    for (int j = 0; j < spec.n_side; ++j)
      out << csv_number(j * spec.h()) << ',' << csv_number(u(j)) << '\n';
  }
  {
    std::ofstream out(dir / "centerline_v.csv");
    out << "x,v\n";
    for (int i = 0; i < spec.n_side; ++i)
      out << csv_number(i * spec.h()) << ',' << csv_number(v(i)) << '\n';
  }
}

void write_cavity_outputs(const fs::path &run_dir, const CavitySpec &spec,
                          const Vector &final_state)
{
  fs::create_directories(run_dir);
  write_centerlines(run_dir, spec, final_state);
  write_field_dump((run_dir / "streamfunction.dat").string(),
                   final_state.head(spec.field_size()), spec.n_side, spec.h());
}

// Shared state of one experiment invocation.
struct Context
{
  const ConfigFile &cfg;
  const ExperimentOptions &opt;
  fs::path out_dir;
  std::string experiment;
  int seed = 0;
  std::map<std::string, Trajectory> references;

  const Trajectory &reference_for(const ModelSpec &spec, const IntegratorConfig &integ)
  {
    std::ostringstream key;
    key << family_name(spec) << ':' << grid_size(spec) << ':';
    std::visit(
        [&key](const auto &s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CavitySpec>)
            key << s.reynolds;
          else
            key << s.viscosity;
        },
        spec);
    key << ':' << integ.dt << ':' << integ.t_end;
    auto it = references.find(key.str());
    if (it == references.end()) {
      const FullModel model = make_model(spec);
      it = references.emplace(key.str(), integrate_full(model, integ)).first;
    }
    return it->second;
  }
};

void execute_point(Context &ctx, const RunPoint &pt, const std::string &run_id, Row &row)
{
  const IntegratorConfig integ = integ_from(ctx.cfg);
  const FullModel model = make_model(pt.spec);
  const auto tick = Clock::now();

  Trajectory traj;
  switch (pt.method) {
    case Method::Full: {
      traj = integrate_full(model, integ);
      row.set("converged", 1);
      break;
    }
    case Method::Coarse: {
      // The trial builder already runs the coarse model and lifts its samples;
      // request them at the recording instants and wrap them as a trajectory.
      TrialSpec trial = trial_from(ctx.cfg, pt.spec, pt.k0);
      trial.kind = TrialKind::CoarseModel;
      const std::vector<double> times = record_times(integ);
      row.set("trial", "coarse");
      row.set("coarse_points", trial.coarse_points);
      row.set("coarse_factor", trial.coarse_factor);
      row.set("coarse_dt", trial.coarse_dt);
      row.set("fourier_modes", trial.fourier_modes);
      traj.times = times;
      traj.states = build_trial_samples(model, trial, integ, times);
      const ErrorMetrics err =
          compare_against_reference(traj, ctx.reference_for(pt.spec, integ), norm_weight(pt.spec));
      row.set("sup_error", err.sup_error);
      row.set("final_error", err.final_error);
      row.set("converged", 1);
      break;
    }
    case Method::Sirm: {
      const SirmConfig sc = sirm_from(ctx.cfg, pt.spec, pt.eta, pt.k0);
      row.set("snapshots", sc.snapshot_count);
      row.set("gamma", sc.gamma);
      row.set("eta", sc.criterion.eta);
      row.set("k_min", sc.criterion.k_min);
      row.set("k_max", sc.criterion.k_max);
      row.set("epsilon", sc.epsilon);
      row.set("max_iterations", sc.max_iterations);
      row.set("reduced_dt", sc.reduced_dt);
      row.set("ensemble",
              sc.ensemble_form == EnsembleForm::Extended ? "extended" : "tangent_only");
      row.set("trial", sc.trial.kind == TrialKind::CoarseModel ? "coarse" : "constant");
      row.set("coarse_points", sc.trial.coarse_points);
      row.set("coarse_factor", sc.trial.coarse_factor);
      row.set("coarse_dt", sc.trial.coarse_dt);
      row.set("fourier_modes", sc.trial.fourier_modes);
      const Trajectory &ref = ctx.reference_for(pt.spec, integ);
      const SirmResult res = sirm_solve(model, sc, integ, &ref);
      traj = res.trajectory;
      const std::string conv = "convergence_" + run_id + ".csv";
      res.report.write_csv((ctx.out_dir / conv).string());
      row.set("convergence_csv", conv);
      row.set("k_final", res.basis.k());
      row.set("iterations", static_cast<int>(res.report.iterations.size()));
      row.set("converged", res.report.converged() ? 1 : 0);
      if (!res.report.iterations.empty())
        row.set("truncation_estimate", res.report.iterations.back().truncation_estimate);
      const ErrorMetrics err = compare_against_reference(traj, ref, norm_weight(pt.spec));
      row.set("sup_error", err.sup_error);
      row.set("final_error", err.final_error);
      break;
    }
    case Method::LocalSirm: {
      const int m_prime = pt.m_prime > 0 ? pt.m_prime : ctx.cfg.get_int("local", "m_prime", 3);
      const int fallback_m = ctx.cfg.get_int("local", "subintervals", 1);
      const int subs = resolve_subintervals(pt.m_rule, m_prime, integ.step_count(), fallback_m);
      const LocalConfig lc = local_from(ctx.cfg, pt.spec, m_prime, subs);
      row.set("subintervals", lc.subintervals);
      row.set("m_prime", lc.m_prime);
      row.set("basis", lc.basis_method == BasisMethod::GramSchmidt ? "gram_schmidt" : "pod");
      row.set("gamma", lc.gamma);
      row.set("epsilon", lc.epsilon);
      row.set("max_iterations", lc.max_iterations);
      row.set("eta", lc.criterion.eta);
      switch (lc.trial_strategy) {
        case LocalTrialStrategy::Constant: row.set("trial", "constant"); break;
        case LocalTrialStrategy::CoarseModel: row.set("trial", "coarse"); break;
        case LocalTrialStrategy::TimeHistory: row.set("trial", "time_history"); break;
      }
      row.set("coarse_factor", lc.coarse_factor);
      row.set("coarse_dt", lc.coarse_dt);
      row.set("fourier_modes", lc.fourier_modes);
      const LocalResult res = local_sirm_solve(model, lc, integ);
      traj = res.trajectory;
      const std::string conv = "convergence_" + run_id + ".csv";
      res.write_csv((ctx.out_dir / conv).string());
      row.set("convergence_csv", conv);
      int k_max_seen = 0;
      bool all_ok = !res.records.empty();
      for (const auto &r : res.records) {
        k_max_seen = std::max(k_max_seen, r.k);
        all_ok = all_ok && r.converged;
      }
      row.set("k_final", k_max_seen);
      row.set("iterations", res.mean_iterations());
      row.set("converged", all_ok ? 1 : 0);
      const ErrorMetrics err =
          compare_against_reference(traj, ctx.reference_for(pt.spec, integ), norm_weight(pt.spec));
      row.set("sup_error", err.sup_error);
      row.set("final_error", err.final_error);
      break;
    }
    case Method::Dirm: {
      DirmConfig dc;
      dc.block_count = ctx.cfg.get_int("dirm", "blocks");
      dc.modes_per_block =
          pt.dirm_modes > 0 ? pt.dirm_modes : ctx.cfg.get_int("dirm", "modes_per_block");
      row.set("dirm_blocks", dc.block_count);
      row.set("dirm_modes_per_block", dc.modes_per_block);
      const SirmConfig sc = sirm_from(ctx.cfg, pt.spec, pt.eta, pt.k0);
      row.set("snapshots", sc.snapshot_count);
      row.set("epsilon", sc.epsilon);
      row.set("max_iterations", sc.max_iterations);
      row.set("trial", sc.trial.kind == TrialKind::CoarseModel ? "coarse" : "constant");
      const Trajectory &ref = ctx.reference_for(pt.spec, integ);
      const SirmResult res = dirm_solve(model, dc, sc, integ, &ref);
      traj = res.trajectory;
      const std::string conv = "convergence_" + run_id + ".csv";
      res.report.write_csv((ctx.out_dir / conv).string());
      row.set("convergence_csv", conv);
      row.set("k_final", res.report.iterations.empty() ? 0 : res.report.iterations.back().k);
      row.set("iterations", static_cast<int>(res.report.iterations.size()));
      row.set("converged", res.report.converged() ? 1 : 0);
      const ErrorMetrics err = compare_against_reference(traj, ref, norm_weight(pt.spec));
      row.set("sup_error", err.sup_error);
      row.set("final_error", err.final_error);
      break;
    }
  }
  row.set("wall_time_s", seconds_since(tick));

  if (const auto *cs = std::get_if<CavitySpec>(&pt.spec); cs && !traj.empty())
    write_cavity_outputs(ctx.out_dir / run_id, *cs, traj.states.col(traj.states.cols() - 1));
}

int run_sweep(Context &ctx, Method method)
{
  const ModelSpec base = base_spec(ctx.cfg);
  const ConfigFile &cfg = ctx.cfg;

  std::vector<double> viscosities;
  if (cfg.has("sweep", "viscosity"))
    viscosities = cfg.get_list("sweep", "viscosity");
  std::vector<int> dirm_modes;
  if (cfg.has("sweep", "dirm_modes")) {
    dirm_modes = cfg.get_int_list("sweep", "dirm_modes");
    if (dirm_modes.size() != viscosities.size())
      throw ConfigError("sweep dirm_modes must pair up with sweep viscosity");
  }
  std::vector<int> grids;
  if (cfg.has("sweep", "grids"))
    grids = cfg.get_int_list("sweep", "grids");
  std::vector<double> etas;
  if (cfg.has("sweep", "eta"))
    etas = cfg.get_list("sweep", "eta");
  std::vector<int> k0s;
  if (cfg.has("sweep", "k0"))
    k0s = cfg.get_int_list("sweep", "k0");
  std::vector<std::string> m_rules;
  if (cfg.has("sweep", "m_rule")) {
    std::istringstream in(cfg.get_string("sweep", "m_rule"));
    std::string tok;
    while (in >> tok)
      m_rules.push_back(tok);
  }
  std::vector<int> m_primes;
  if (cfg.has("sweep", "m_prime"))
    m_primes = cfg.get_int_list("sweep", "m_prime");

  const double base_eta = cfg.get_double("sirm", "eta", 1e-8);

  // Absent axes contribute one neutral element so the cross product is flat.
  std::vector<RunPoint> points;
  const size_t nv = std::max<size_t>(1, viscosities.size());
  const size_t ng = std::max<size_t>(1, grids.size());
  const size_t ne = std::max<size_t>(1, etas.size());
  const size_t nk = std::max<size_t>(1, k0s.size());
  const size_t nr = std::max<size_t>(1, m_rules.size());
  const size_t nm = std::max<size_t>(1, m_primes.size());
  for (size_t iv = 0; iv < nv; ++iv)
    for (size_t ig = 0; ig < ng; ++ig)
      for (size_t ie = 0; ie < ne; ++ie)
        for (size_t ik = 0; ik < nk; ++ik)
          for (size_t ir = 0; ir < nr; ++ir)
            for (size_t im = 0; im < nm; ++im) {
              RunPoint pt;
              pt.method = method;
              pt.spec = base;
              if (!grids.empty())
                pt.spec = spec_with_size(pt.spec, grids[ig]);
              if (!viscosities.empty())
                pt.spec = spec_with_viscosity(pt.spec, viscosities[iv]);
              pt.eta = etas.empty() ? base_eta : etas[ie];
              pt.k0 = k0s.empty() ? 0 : k0s[ik];
              pt.m_rule = m_rules.empty() ? std::string() : m_rules[ir];
              pt.m_prime = m_primes.empty() ? 0 : m_primes[im];
              pt.dirm_modes = dirm_modes.empty() ? 0 : dirm_modes[iv];
              points.push_back(std::move(pt));
            }

  std::ofstream results(ctx.out_dir / "results.csv");
  if (!results)
    throw std::runtime_error("cannot write " + (ctx.out_dir / "results.csv").string());
  results << "# error norm: mesh-weighted discrete L2, sqrt(sum_i h |e_i|^2) with h the "
             "grid cell measure; sup_error is its max over the run's recorded times "
             "against the full-model reference, final_error the value at the last shared "
             "time; successive_diff columns in convergence files stay unweighted\n";
  {
    std::string header;
    for (const auto &c : columns())
      header += (header.empty() ? "" : ",") + c;
    results << header << '\n';
  }

  int ok = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    std::ostringstream id;
    id << "run_" << std::setfill('0') << std::setw(3) << i + 1;
    const RunPoint &pt = points[i];

    Row row;
    row.set("run", id.str());
    row.set("experiment", ctx.experiment);
    row.set("method", method_name(pt.method));
    row.set("family", family_name(pt.spec));
    row.set("grid", grid_size(pt.spec));
    std::visit(
        [&row](const auto &s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CavitySpec>) {
            row.set("reynolds", s.reynolds);
            row.set("lid_speed", s.lid_speed);
          } else {
            row.set("viscosity", s.viscosity);
            if constexpr (std::is_same_v<T, AdvDiffSpec>)
              row.set("speed", s.speed);
          }
        },
        pt.spec);
    row.set("t_start", ctx.cfg.get_double("time", "t_start", 0.0));
    row.set("t_end", ctx.cfg.get_double("time", "t_end"));
    row.set("dt", ctx.cfg.get_double("time", "dt"));
    row.set("record_every", ctx.cfg.get_int("time", "record_every", 1));
    row.set("seed", ctx.seed);

    try {
      execute_point(ctx, pt, id.str(), row);
      row.set("status", "ok");
      ++ok;
    } catch (const std::exception &e) {
      row.set("status", "error: " + sanitize(e.what()));
      std::cerr << id.str() << " failed: " << e.what() << "\n";
    }
    results << row.line() << '\n';
  }

  std::cout << "wrote " << (ctx.out_dir / "results.csv").string() << " (" << ok << "/"
            << points.size() << " runs ok)\n";
  return (ok == 0 && !points.empty()) ? kExitAllRunsFailed : kExitOk;
}

int run_scaling(Context &ctx)
{
  const ConfigFile &cfg = ctx.cfg;
  const ModelSpec base = base_spec(ctx.cfg);
  const auto *cs = std::get_if<CavitySpec>(&base);
  if (!cs)
    throw ConfigError("the scaling experiment needs a cavity model");
  const std::vector<int> sides = cfg.get_int_list("scaling", "grids");
  if (sides.size() < 3)
    throw ConfigError("the scaling experiment needs at least 3 grid sizes");
  const int anchor = cfg.get_int("scaling", "anchor_side", sides.front());
  const double dt_anchor = cfg.get_double("time", "dt");
  const double t_end = cfg.get_double("time", "t_end");

  const int m_prime = cfg.get_int("local", "m_prime", 3);
  const int subs = cfg.get_int("local", "subintervals", 1);
  const LocalConfig lc = local_from(cfg, base, m_prime, subs);

  const ScalingReport report =
      scaling_study(*cs, sides, anchor, dt_anchor, t_end, lc, ctx.opt.timing_override);

  {
    std::ofstream out(ctx.out_dir / "scaling.csv");
    out << "side,n_points,method,status,wall_time_s\n";
    for (const auto &p : report.points) {
      out << p.side << ',' << p.n_points << ",full," << (p.full_ok ? "ok" : "failed") << ','
          << csv_number(p.full_time) << '\n';
      out << p.side << ',' << p.n_points << ",local_sirm," << (p.local_ok ? "ok" : "failed")
          << ',' << csv_number(p.local_time) << '\n';
    }
  }
  {
    std::ofstream out(ctx.out_dir / "scaling_fit.csv");
    out << "method,exponent,intercept,r_squared,points_used\n";
    const auto fit_line = [&out](const char *name, const std::optional<PowerFit> &fit,
                                 int used) {
      if (fit)
        out << name << ',' << csv_number(fit->exponent) << ',' << csv_number(fit->intercept)
            << ',' << csv_number(fit->r_squared) << ',' << used << '\n';
      else
        out << name << ",,,," << used << '\n';
    };
    int full_used = 0, local_used = 0;
    for (const auto &p : report.points) {
      full_used += p.full_ok ? 1 : 0;
      local_used += p.local_ok ? 1 : 0;
    }
    fit_line("full", report.full_fit, full_used);
    fit_line("local_sirm", report.local_fit, local_used);
  }

  int ok = 0;
  for (const auto &p : report.points)
    ok += (p.full_ok || p.local_ok) ? 1 : 0;
  std::cout << "wrote " << (ctx.out_dir / "scaling.csv").string();
  if (report.full_fit && report.local_fit)
    std::cout << " (exponents: full " << csv_number(report.full_fit->exponent)
              << ", local_sirm " << csv_number(report.local_fit->exponent) << ")";
  std::cout << "\n";
  return ok == 0 ? kExitAllRunsFailed : kExitOk;
}

}  // namespace

int run_experiment(ConfigFile cfg, const ExperimentOptions &opt)
{
  if (opt.paper_scale)
    cfg.apply_override_section("paper-scale");

  Context ctx{cfg, opt, {}, {}, 0, {}};
  ctx.experiment = cfg.get_string("experiment", "name", "custom");
  ctx.seed = opt.seed.value_or(cfg.get_int("experiment", "seed", 0));
  const std::string out =
      !opt.out_dir.empty() ? opt.out_dir : cfg.get_string("experiment", "out_dir", "out");
  ctx.out_dir = out;
  fs::create_directories(ctx.out_dir);

  int code;
  if (ctx.experiment == "scaling") {
    code = run_scaling(ctx);
  } else {
    const Method method = parse_method(cfg.get_string("experiment", "method", "sirm"));
    code = run_sweep(ctx, method);
  }

  for (const auto &key : cfg.untouched_keys())
    if (key.rfind("[paper-scale]", 0) != 0)
      std::cerr << "warning: unused config key " << key << "\n";
  return code;
}

ScalingReport scaling_study(const CavitySpec &base, const std::vector<int> &sides,
                            int anchor_side, double dt_anchor, double t_end,
                            const LocalConfig &local_cfg,
                            const std::function<double(long, bool)> &timing_override)
{
  if (sides.size() < 3)
    throw std::invalid_argument("scaling_study: need at least 3 grid sizes");
  if (anchor_side < 2 || dt_anchor <= 0.0 || t_end <= 0.0)
    throw std::invalid_argument("scaling_study: bad anchor or time parameters");

  ScalingReport report;
  for (int side : sides) {
    ScalingPoint pt;
    pt.side = side;
    pt.n_points = static_cast<long>(side) * side;

    if (timing_override) {
      pt.full_time = timing_override(pt.n_points, false);
      pt.local_time = timing_override(pt.n_points, true);
      pt.full_ok = pt.local_ok = true;
      report.points.push_back(pt);
      continue;
    }

    CavitySpec spec = base;
    spec.n_side = side;
    spec.validate();
    const double raw_dt = dt_anchor * (anchor_side - 1) / (side - 1);
    const int steps = std::max(1, static_cast<int>(std::llround(t_end / raw_dt)));

    IntegratorConfig integ;
    integ.t_end = t_end;
    integ.dt = t_end / steps;
    integ.record_every = std::max(1, steps / 10);

    const FullModel model = make_model(spec);
    try {
      const auto tick = Clock::now();
      integrate_full(model, integ);
      pt.full_time = seconds_since(tick);
      pt.full_ok = true;
    } catch (const std::exception &e) {
      std::cerr << "scaling: full model failed at side " << side << ": " << e.what() << "\n";
    }

    LocalConfig lc = local_cfg;
    lc.model_spec = spec;
    lc.subintervals = nearest_divisor(steps, lc.subintervals);
    try {
      const auto tick = Clock::now();
      local_sirm_solve(model, lc, integ);
      pt.local_time = seconds_since(tick);
      pt.local_ok = true;
    } catch (const std::exception &e) {
      std::cerr << "scaling: partitioned solver failed at side " << side << ": " << e.what()
                << "\n";
    }
    report.points.push_back(pt);
  }

  std::vector<double> ns, ts;
  for (const auto &p : report.points)
    if (p.full_ok) {
      ns.push_back(static_cast<double>(p.n_points));
      ts.push_back(p.full_time);
    }
  if (ns.size() >= 3)
    report.full_fit = fit_loglog(ns, ts);
  ns.clear();
  ts.clear();
  for (const auto &p : report.points)
    if (p.local_ok) {
      ns.push_back(static_cast<double>(p.n_points));
      ts.push_back(p.local_time);
    }
  if (ns.size() >= 3)
    report.local_fit = fit_loglog(ns, ts);
  return report;
}

void write_field_dump(const std::string &path, const Vector &field, int side, double spacing)
{
  if (static_cast<int>(field.size()) != side * side)
    throw std::invalid_argument("write_field_dump: field size does not match the grid");
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_field_dump: cannot write " + path);
  out << side << ' ' << side << '\n' << csv_number(spacing) << '\n';
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i)
      out << (i ? " " : "") << csv_number(field(static_cast<long>(j) * side + i));
    out << '\n';
  }
}

}  // namespace sirm
