#include "wentzell/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "wentzell/attractor.hpp"
#include "wentzell/bounds.hpp"
#include "wentzell/dynamics.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/io.hpp"
#include "wentzell/spectral.hpp"

namespace wentzell {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class RunDirectory {
 public:
  RunDirectory(const std::string& command, const ExperimentConfig& config, const RunContext& ctx,
               bool keep_existing = false)
      : command_(command), config_(config), started_(utc_timestamp()) {
    hash_ = config_hash(config);
    result_.run_dir = ctx.out_root / (command + "-" + hash_);
    if (!keep_existing && fs::exists(result_.run_dir)) fs::remove_all(result_.run_dir);
    fs::create_directories(result_.run_dir);
    write_json("config.json", to_json(config));
  }

  fs::path path(const std::string& name) const { return result_.run_dir / name; }

  void add(const std::string& name) {
    if (std::find(result_.files.begin(), result_.files.end(), name) == result_.files.end()) {
      result_.files.push_back(name);
    }
  }

  void write_json(const std::string& name, const json& value) {
    wentzell::write_json(path(name), value);
    add(name);
  }

  void warn(std::string message) { result_.warnings.push_back(std::move(message)); }

  RunResult finish() {
    json files = json::array();
    for (const auto& name : result_.files) {
      const fs::path p = path(name);
      if (!fs::exists(p)) throw NumericFailure("expected output missing: " + name);
      files.push_back({{"name", name}, {"bytes", fs::file_size(p)}, {"fnv1a64", hash_file(p)}});
    }
    json manifest = {{"tool", "wentzell-lab"},
                     {"version", kToolVersion},
                     {"command", command_},
                     {"config_hash", hash_},
                     {"seed", config_.seed},
                     {"started", started_},
                     {"finished", utc_timestamp()},
                     {"files", files},
                     {"warnings", result_.warnings}};
    wentzell::write_json(path("manifest.json"), manifest);
    return result_;
  }

 private:
  std::string command_;
  const ExperimentConfig& config_;
  std::string started_;
  std::string hash_;
  RunResult result_;
};

struct Problem {
  Mesh mesh;
  OperatorPencil pencil;
  Nonlinearity nonlin;
};

Problem build_problem(const ExperimentConfig& config) {
  Mesh mesh = config.domain.mesh();
  OperatorPencil pencil = assemble_pencil(mesh, config.params, std::nullopt, config.domain.mass);
  return {std::move(mesh), std::move(pencil), config.nonlinearity.build()};
}

Spectrum compute_spectrum(const OperatorPencil& pencil, const ExperimentConfig& config, Index modes) {
  EigenOptions opt;
  opt.tolerance = config.spectral.tolerance;
  opt.seed = config.seed;
  if (modes >= pencil.size()) {
    throw ConfigError("spectral.modes", "must be smaller than the node count " +
                                            std::to_string(pencil.size()));
  }
  return solve_eigs(pencil, modes, opt);
}

/// Weyl constant from the closed forms: C_D in 1D, the upper bracket end otherwise.
double closed_form_constant(const Domain& domain, double b) {
  const WeylConstants w = weyl_constants(domain, b);
  return domain.dimension() == 1 ? w.bulk : w.wentzell_bracket().upper;
}

struct SpectralSummary {
  json weyl;
  json lieb_thirring;
  double weyl_constant = 0.0;
  double lt_constant = 1.0;
};

SpectralSummary summarize_spectrum(const Spectrum& spectrum, const ExperimentConfig& config,
                                   std::vector<std::string>& warnings) {
  const Domain domain = config.domain.domain();
  const int n = domain.dimension();
  const WeylConstants wc = weyl_constants(domain, config.params.b);
  SpectralSummary s;

  s.weyl = {{"dimension", n}, {"C_D", wc.bulk}};
  if (wc.surface) {
    s.weyl["C_S"] = *wc.surface;
    s.weyl["bracket"] = {wc.bracket->lower, wc.bracket->upper};
    s.weyl["superposition"] = wc.bulk * config.params.b * *wc.surface /
                              (wc.bulk + config.params.b * *wc.surface);
  }

  const IndexWindow window = config.spectral.window.value_or(default_fit_window(spectrum.count()));
  bool fitted = false;
  try {
    const WeylFit fit = weyl_fit(spectrum, n, window);
    s.weyl["exponent_used"] = fit.exponent_used;
    s.weyl["fitted_slope"] = fit.fitted_slope;
    s.weyl["fit_window"] = {fit.fit_window.lo, fit.fit_window.hi};
    s.weyl["residual"] = fit.residual;
    if (wc.bracket) s.weyl["in_bracket"] = wc.bracket->contains(fit.fitted_slope);
    s.weyl_constant = fit.fitted_slope;
    fitted = fit.fitted_slope > 0.0;
  } catch (const InvalidArgument& e) {
    warnings.push_back(std::string("Weyl fit skipped: ") + e.what());
  }
  if (!fitted) s.weyl_constant = closed_form_constant(domain, config.params.b);
  s.weyl["operational_constant"] = s.weyl_constant;

  std::vector<Index> m_list = config.spectral.lt_m;
  if (m_list.empty()) {
    for (Index m = 5; m <= spectrum.count(); m += 5) m_list.push_back(m);
    if (m_list.empty()) m_list.push_back(spectrum.count());
  }
  const LiebThirringReport lt = lieb_thirring_check(spectrum, n, s.weyl_constant, m_list);
  json rows = json::array();
  for (const auto& r : lt.rows) {
    rows.push_back({{"m", r.m}, {"sum", r.gradient_sum}, {"unit_bound", r.unit_bound}, {"margin", r.margin}});
  }
  s.lieb_thirring = {{"weyl_constant", s.weyl_constant}, {"c1", finite_or_null(lt.c1)}, {"rows", rows}};
  if (std::isfinite(lt.c1) && lt.c1 > 0.0) {
    s.lt_constant = lt.c1;
  } else {
    warnings.push_back("Lieb-Thirring constant undefined; using c1 = 1");
  }
  return s;
}

json bound_json(const BoundReport& r) {
  json j = {{"dimension", r.dimension},
            {"weyl_constant", r.weyl_constant},
            {"lt_constant", r.lt_constant},
            {"d_star", r.d_star},
            {"upper_W", r.upper_W},
            {"lower_W", r.lower_W},
            {"upper_static", r.upper_static},
            {"lower_static", r.lower_static}};
  if (r.upper_surface) {
    j["upper_surface"] = *r.upper_surface;
    j["lower_surface"] = *r.lower_surface;
  }
  const auto& f = r.prefactors;
  j["prefactors"] = {{"static_lower", f.static_lower},   {"static_upper", f.static_upper},
                     {"wentzell_lower", f.wentzell_lower}, {"wentzell_upper", f.wentzell_upper},
                     {"surface_lower", f.surface_lower}, {"surface_upper", f.surface_upper}};
  return j;
}

/// Most unstable constant equilibrium (largest chi, then smallest |z|).
Equilibrium select_equilibrium(const Nonlinearity& nonlin, const ProblemParams& params) {
  std::vector<Equilibrium> eqs;
  try {
    eqs = find_constant_equilibria(nonlin, params);
  } catch (const NotDefined&) {
    // Linear flow without forcing: every constant is steady; take zero.
    return Equilibrium{0.0, params.lambda, 0.0};
  }
  if (eqs.empty()) throw NumericFailure("no constant equilibrium exists for these parameters");
  return *std::max_element(eqs.begin(), eqs.end(), [](const Equilibrium& a, const Equilibrium& b) {
    if (a.chi != b.chi) return a.chi < b.chi;
    return std::abs(a.z) > std::abs(b.z);
  });
}

json equilibrium_json(const Equilibrium& e) {
  return {{"z", e.z}, {"chi", e.chi}, {"residual", e.residual}};
}

/// Re-solves with more modes until nu * Lambda_last exceeds chi.
Spectrum deep_enough(const OperatorPencil& pencil, const ExperimentConfig& config, Spectrum spectrum,
                     double chi) {
  const Index cap = pencil.size() - 1;
  while (!(config.params.nu * spectrum.eigenvalues[spectrum.count() - 1] > chi)) {
    if (spectrum.count() >= cap) throw NumericFailure("mesh too coarse to resolve every unstable mode");
    spectrum = compute_spectrum(pencil, config, std::min(cap, 2 * spectrum.count()));
  }
  return spectrum;
}

json unstable_json(const UnstableCount& u) {
  return {{"equilibrium", equilibrium_json(u.equilibrium)},
          {"count_direct", u.count_direct},
          {"count_paper", u.count_paper},
          {"crossover_band", u.crossover_band}};
}

LyapunovOptions lyapunov_options(const ExperimentConfig& config) {
  LyapunovOptions opt;
  opt.modes = config.dimension.modes;
  opt.T = config.dimension.T;
  opt.tau = config.dimension.tau;
  opt.reorth_period = config.dimension.reorth_period;
  opt.transient_fraction = config.dimension.transient_fraction;
  opt.seed = config.seed;
  return opt;
}

json estimate_json(const DimensionEstimate& est) {
  return {{"lyapunov_exponents", est.lyapunov_exponents},
          {"kaplan_yorke", est.kaplan_yorke},
          {"trace_sums", est.trace_sums},
          {"m_star_trace", est.m_star_trace >= 0 ? json(est.m_star_trace) : json(nullptr)},
          {"drift", est.drift},
          {"drift_warning", est.drift_warning},
          {"averaging_time", est.averaging_time}};
}

}  // namespace

RunResult cmd_eigs(const ExperimentConfig& config, const RunContext& ctx) {
  RunDirectory run("eigs", config, ctx);
  const Problem p = build_problem(config);
  if (config.output.mesh) {
    write_mesh_csv(p.mesh, run.path("mesh"));
    for (const char* f : {"mesh/nodes.csv", "mesh/elements.csv", "mesh/boundary.csv"}) run.add(f);
  }
  if (config.output.matrices) {
    write_coo(p.pencil.K, run.path("K.coo"));
    write_coo(p.pencil.M, run.path("M.coo"));
    run.add("K.coo");
    run.add("M.coo");
  }
  const Spectrum spectrum = compute_spectrum(p.pencil, config, config.spectral.modes);
  write_spectrum_csv(spectrum, run.path("spectrum.csv"));
  run.add("spectrum.csv");

  std::vector<std::string> warnings;
  const SpectralSummary s = summarize_spectrum(spectrum, config, warnings);
  for (auto& w : warnings) run.warn(w);
  run.write_json("weyl_fit.json", s.weyl);
  run.write_json("lieb_thirring.json", s.lieb_thirring);
  return run.finish();
}

RunResult cmd_simulate(const ExperimentConfig& config, const RunContext& ctx) {
  RunDirectory run("simulate", config, ctx);
  const Problem p = build_problem(config);
  const Eigen::VectorXd u0 = config.dynamics.initial.build(p.mesh, config.seed);

  SimulateOptions opt;
  opt.T = config.dynamics.T;
  opt.tau = config.dynamics.tau;
  opt.sample_every = config.dynamics.sample_every;
  opt.adaptive = config.dynamics.adaptive;
  const TrajectoryDiagnostics d = simulate(p.pencil, config.params, p.nonlin, u0, opt);

  write_diagnostics_csv(d, run.path("diagnostics.csv"));
  run.add("diagnostics.csv");
  if (config.output.snapshot) {
    write_state_csv(p.mesh, d.final_state, run.path("final_state.csv"));
    run.add("final_state.csv");
  }
  if (d.substeps > d.steps) {
    run.warn("stability guard forced " + std::to_string(d.substeps - d.steps) + " extra substeps");
  }
  run.write_json("summary.json", {{"steps", d.steps},
                                  {"substeps", d.substeps},
                                  {"final_x2_norm_sq", d.x2_norm_sq.back()},
                                  {"final_linf_norm", d.linf_norm.back()},
                                  {"final_mass", d.total_mass.back()},
                                  {"fitted_decay_rate", finite_or_null(d.fitted_decay_rate)}});
  return run.finish();
}

RunResult cmd_dimension(const ExperimentConfig& config, const RunContext& ctx) {
  RunDirectory run("dimension", config, ctx);
  const Problem p = build_problem(config);
  Spectrum spectrum = compute_spectrum(p.pencil, config, config.spectral.modes);

  std::vector<std::string> warnings;
  const SpectralSummary s = summarize_spectrum(spectrum, config, warnings);
  for (auto& w : warnings) run.warn(w);

  LyapunovOptions opt = lyapunov_options(config);
  Eigen::VectorXd u0;
  json dim;
  if (config.dimension.background == "equilibrium") {
    const Equilibrium eq = select_equilibrium(p.nonlin, config.params);
    u0 = Eigen::VectorXd::Constant(p.pencil.size(), eq.z);
    opt.freeze_background = true;
    spectrum = deep_enough(p.pencil, config, std::move(spectrum), eq.chi);
    const UnstableCount u = unstable_count(p.pencil, config.params, eq, spectrum);
    run.write_json("unstable_count.json", unstable_json(u));
    dim["equilibrium"] = equilibrium_json(eq);
  } else {
    u0 = config.dynamics.initial.build(p.mesh, config.seed);
  }
  opt.modes = std::min(opt.modes, p.pencil.size());
  const DimensionEstimate est = lyapunov_spectrum(p.pencil, config.params, p.nonlin, u0, opt);
  if (est.drift_warning) run.warn("Lyapunov exponents still drifting (drift " + std::to_string(est.drift) + ")");
  write_exponents_csv(est, run.path("exponents.csv"));
  run.add("exponents.csv");

  const BoundReport bounds = evaluate_bounds(config.params, p.nonlin.growth(), config.domain.domain(),
                                             s.weyl_constant, s.lt_constant, config.bounds.prefactors);
  dim.update(estimate_json(est));
  dim["background"] = config.dimension.background;
  dim["ky_below_d_star"] = est.kaplan_yorke <= bounds.d_star;
  run.write_json("dimension.json", dim);
  run.write_json("bounds.json", bound_json(bounds));
  return run.finish();
}

RunResult cmd_bounds(const ExperimentConfig& config, const RunContext& ctx) {
  RunDirectory run("bounds", config, ctx);
  const Domain domain = config.domain.domain();
  const Nonlinearity nonlin = config.nonlinearity.build();
  const WeylConstants w = weyl_constants(domain, config.params.b);
  json wj = {{"dimension", w.dimension}, {"C_D", w.bulk}};
  if (w.surface) {
    wj["C_S"] = *w.surface;
    wj["bracket"] = {w.bracket->lower, w.bracket->upper};
  }
  run.write_json("weyl_constants.json", wj);

  const double c = closed_form_constant(domain, config.params.b);
  const BoundReport r = evaluate_bounds(config.params, nonlin.growth(), domain, c, 1.0, config.bounds.prefactors);
  run.write_json("bounds.json", bound_json(r));

  if (!config.bounds.scaling_sizes.empty()) {
    std::vector<Domain> family;
    for (double s : config.bounds.scaling_sizes) family.push_back(domain.scaled(s));
    if (family.size() < 2) throw ConfigError("bounds.scaling_sizes", "need at least two sizes");
    const ScalingTable t = compare_scaling(family, config.params, nonlin.growth(), 1.0, config.bounds.prefactors);
    write_scaling_csv(t, run.path("scaling.csv"));
    run.add("scaling.csv");
    run.write_json("scaling.json", {{"dimension", t.dimension},
                                    {"slope_wentzell", t.slope_wentzell},
                                    {"slope_static", t.slope_static},
                                    {"asserted", t.asserted}});
  }
  return run.finish();
}

std::vector<ExperimentConfig> sweep_grid(const ExperimentConfig& config) {
  const auto& s = config.sweep;
  if (!s.nu && !s.lambda && !s.b && !s.size) return {};
  auto axis = [](const std::optional<std::vector<double>>& a, double base) {
    return a ? *a : std::vector<double>{base};
  };
  std::vector<ExperimentConfig> out;
  for (double nu : axis(s.nu, config.params.nu)) {
    for (double lambda : axis(s.lambda, config.params.lambda)) {
      for (double b : axis(s.b, config.params.b)) {
        for (double size : axis(s.size, 1.0)) {
          ExperimentConfig point = config;
          point.sweep = SweepConfig{};
          point.params.nu = nu;
          point.params.lambda = lambda;
          point.params.b = b;
          point.domain = config.domain.scaled(size);
          out.push_back(std::move(point));
        }
      }
    }
  }
  return out;
}

json sweep_record(const ExperimentConfig& point) {
  const Problem p = build_problem(point);
  std::vector<std::string> warnings;
  const Equilibrium eq = select_equilibrium(p.nonlin, point.params);
  Spectrum spectrum = compute_spectrum(p.pencil, point, point.spectral.modes);
  spectrum = deep_enough(p.pencil, point, std::move(spectrum), eq.chi);
  const SpectralSummary s = summarize_spectrum(spectrum, point, warnings);
  const UnstableCount u = unstable_count(p.pencil, point.params, eq, spectrum);

  LyapunovOptions opt = lyapunov_options(point);
  opt.freeze_background = true;
  const Index cap = p.pencil.size();
  opt.modes = std::min(cap, std::max(opt.modes, 2 * u.count_paper + 8));
  const Eigen::VectorXd u0 = Eigen::VectorXd::Constant(p.pencil.size(), eq.z);
  DimensionEstimate est = lyapunov_spectrum(p.pencil, point.params, p.nonlin, u0, opt);
  while (est.m_star_trace < 0 && opt.modes < cap) {
    opt.modes = std::min(cap, 2 * opt.modes);
    est = lyapunov_spectrum(p.pencil, point.params, p.nonlin, u0, opt);
  }
  const BoundReport bounds = evaluate_bounds(point.params, p.nonlin.growth(), point.domain.domain(),
                                             s.weyl_constant, s.lt_constant, point.bounds.prefactors);

  json rec;
  rec["inputs"] = {{"nu", point.params.nu},
                   {"lambda", point.params.lambda},
                   {"b", point.params.b},
                   {"size", point.domain.size}};
  rec["weyl_slope"] = s.weyl.contains("fitted_slope") ? s.weyl["fitted_slope"] : json(nullptr);
  if (s.weyl.contains("in_bracket")) rec["in_bracket"] = s.weyl["in_bracket"];
  rec["lt_c1"] = s.lt_constant;
  rec["equilibrium"] = equilibrium_json(eq);
  rec["count_paper"] = u.count_paper;
  rec["count_direct"] = u.count_direct;
  rec["crossover_band"] = u.crossover_band;
  rec["trace_modes"] = opt.modes;
  rec["m_star_trace"] = est.m_star_trace >= 0 ? json(est.m_star_trace) : json(nullptr);
  rec["kaplan_yorke"] = est.kaplan_yorke;
  rec["d_star"] = bounds.d_star;
  rec["upper_W"] = bounds.upper_W;
  rec["lower_W"] = bounds.lower_W;
  rec["drift_warning"] = est.drift_warning;
  if (!warnings.empty()) rec["warnings"] = warnings;
  return rec;
}

RunResult cmd_sweep(const ExperimentConfig& config, const RunContext& ctx) {
  RunDirectory run("sweep", config, ctx, /*keep_existing=*/true);
  const std::vector<ExperimentConfig> grid = sweep_grid(config);
  const fs::path out = run.path("sweep.jsonl");

  std::map<std::string, std::string> done;
  if (fs::exists(out)) {
    std::istringstream in(read_text(out));
    for (std::string line; std::getline(in, line);) {
      try {
        const json rec = json::parse(line);
        done[rec.at("point_hash").get<std::string>()] = line;
      } catch (const std::exception&) {
        // A torn last line from an interrupted run; recomputed below.
      }
    }
  }

  std::vector<std::string> hashes;
  std::vector<std::string> lines(grid.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    hashes.push_back(config_hash(grid[i]));
    auto it = done.find(hashes[i]);
    if (it != done.end()) {
      lines[i] = it->second;
    } else {
      todo.push_back(i);
    }
  }

  std::mutex append_mutex;
  std::ofstream appender;
  if (!todo.empty()) appender.open(out, std::ios::app);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      const std::size_t i = todo[k];
      json rec;
      try {
        rec = sweep_record(grid[i]);
      } catch (const std::exception& e) {
        rec = {{"inputs",
                {{"nu", grid[i].params.nu},
                 {"lambda", grid[i].params.lambda},
                 {"b", grid[i].params.b},
                 {"size", grid[i].domain.size}}},
               {"error", e.what()}};
      }
      rec["index"] = i;
      rec["point_hash"] = hashes[i];
      std::string line = rec.dump();
      std::lock_guard lock(append_mutex);
      appender << line << '\n' << std::flush;
      lines[i] = std::move(line);
    }
  };
  const int workers = std::max(1, std::min<int>(ctx.workers, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (appender.is_open()) appender.close();

  std::string text;
  for (const auto& line : lines) text += line + "\n";
  write_text(out, text);
  run.add("sweep.jsonl");
  for (const auto& line : lines) {
    if (json::parse(line).contains("error")) run.warn("grid point failed: " + line);
  }
  return run.finish();
}

VerifyReport verify_run(const fs::path& run_dir) {
  VerifyReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.problems.push_back(std::move(msg));
  };
  const fs::path manifest_path = run_dir / "manifest.json";
  json manifest;
  try {
    manifest = json::parse(read_text(manifest_path));
  } catch (const std::exception& e) {
    fail(std::string("unreadable manifest: ") + e.what());
    return report;
  }
  try {
    const ExperimentConfig c = load_config(run_dir / "config.json");
    if (config_hash(c) != manifest.at("config_hash").get<std::string>()) {
      fail("config.json does not match the manifest config hash");
    }
    for (const auto& f : manifest.at("files")) {
      const std::string name = f.at("name").get<std::string>();
      const fs::path p = run_dir / name;
      if (!fs::exists(p)) {
        fail("missing file: " + name);
      } else if (fs::file_size(p) != f.at("bytes").get<std::uintmax_t>()) {
        fail("size mismatch: " + name);
      } else if (hash_file(p) != f.at("fnv1a64").get<std::string>()) {
        fail("hash mismatch: " + name);
      }
    }
  } catch (const std::exception& e) {
    fail(std::string("malformed run directory: ") + e.what());
  }
  return report;
}

}  // namespace wentzell
