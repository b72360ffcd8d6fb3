#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phmor/bounds.hpp"
#include "phmor/dissipation.hpp"
#include "phmor/error_snapshots.hpp"
#include "phmor/model_io.hpp"
#include "phmor/models.hpp"

namespace phmor {

struct SignalSpec {
  std::string type = "sinusoid";  // sinusoid | zero
  double amplitude = 1.0;
  double frequency = 0.8;  // Hz
  double phase = 0.0;
};

struct MsdChainParams {
  Index n_masses = 100;
  double mass = 1.0;
  double stiffness = 100.0;
  double damping = 0.5;
};

struct ExperimentConfig {
  std::string model_type = "msd_chain";  // msd_chain | file
  MsdChainParams chain;
  std::string model_manifest;  // used when model_type == "file"

  SignalSpec train_input{"sinusoid", 1.0, 0.8, 0.0};
  SignalSpec test_input{"sinusoid", 1.0, 1.3, 0.0};

  double t_begin = 0.0;
  double t_end = 2.5;
  Index n_steps = 1000;

  Index n = 10;
  Index n_alp = 20;
  Index n_hier = 20;

  bool bound_standard = true;
  bool bound_alp = true;
  bool bound_hier = true;

  std::string fom_solver = "oracle";  // oracle | midpoint
  unsigned long seed = 0;
  Index oracle_limit = kDefaultOracleLimit;
  Index dense_limit = kDefaultDenseLimit;
  Tolerances tol;
  double prop1_tol = 1e-8;
  std::string prop1_extension = "pod";  // pod | scaled | error_pod
  std::string prop1_x0 = "zero";        // zero | span_v | random
};

inline nlohmann::json signal_to_json(const SignalSpec& s) {
  if (s.type == "zero") return {{"type", "zero"}};
  return {{"type", s.type},
          {"amplitude", s.amplitude},
          {"frequency", s.frequency},
          {"phase", s.phase}};
}

inline SignalSpec signal_from_json(const nlohmann::json& j) {
  SignalSpec s;
  s.type = j.value("type", "sinusoid");
  if (s.type != "sinusoid" && s.type != "zero")
    throw ConfigError("input signal type must be 'sinusoid' or 'zero'");
  s.amplitude = j.value("amplitude", 1.0);
  s.frequency = j.value("frequency", 1.0);
  s.phase = j.value("phase", 0.0);
  return s;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["model"] = {{"type", c.model_type}};
  if (c.model_type == "msd_chain")
    j["model"].update({{"n_masses", c.chain.n_masses},
                       {"mass", c.chain.mass},
                       {"stiffness", c.chain.stiffness},
                       {"damping", c.chain.damping}});
  else
    j["model"]["manifest"] = c.model_manifest;
  j["train_input"] = signal_to_json(c.train_input);
  j["test_input"] = signal_to_json(c.test_input);
  j["grid"] = {{"t_begin", c.t_begin}, {"t_end", c.t_end}, {"n_steps", c.n_steps}};
  j["basis"] = {{"n", c.n}, {"n_alp", c.n_alp}, {"n_hier", c.n_hier}};
  nlohmann::json sel = nlohmann::json::array();
  if (c.bound_standard) sel.push_back("standard");
  if (c.bound_alp) sel.push_back("alp");
  if (c.bound_hier) sel.push_back("hier");
  j["bounds"] = sel;
  j["fom_solver"] = c.fom_solver;
  j["seed"] = c.seed;
  j["oracle_limit"] = c.oracle_limit;
  j["dense_limit"] = c.dense_limit;
  j["tolerances"] = {{"tol_struct", c.tol.tol_struct}, {"tol_psd", c.tol.tol_psd}};
  j["prop1"] = {{"tol", c.prop1_tol},
                {"extension", c.prop1_extension},
                {"x0", c.prop1_x0}};
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("model")) {
      const auto& m = j["model"];
      c.model_type = m.value("type", "msd_chain");
      if (c.model_type == "msd_chain") {
        c.chain.n_masses = m.value("n_masses", c.chain.n_masses);
        c.chain.mass = m.value("mass", c.chain.mass);
        c.chain.stiffness = m.value("stiffness", c.chain.stiffness);
        c.chain.damping = m.value("damping", c.chain.damping);
      } else if (c.model_type == "file") {
        if (!m.contains("manifest"))
          throw ConfigError("file model needs a 'manifest' path");
        c.model_manifest = m["manifest"].get<std::string>();
      } else {
        throw ConfigError("model type must be 'msd_chain' or 'file'");
      }
    }
    if (j.contains("train_input")) c.train_input = signal_from_json(j["train_input"]);
    if (j.contains("test_input")) c.test_input = signal_from_json(j["test_input"]);
    if (j.contains("grid")) {
      c.t_begin = j["grid"].value("t_begin", c.t_begin);
      c.t_end = j["grid"].value("t_end", c.t_end);
      c.n_steps = j["grid"].value("n_steps", c.n_steps);
    }
    if (j.contains("basis")) {
      c.n = j["basis"].value("n", c.n);
      c.n_alp = j["basis"].value("n_alp", c.n_alp);
      c.n_hier = j["basis"].value("n_hier", c.n_hier);
    }
    if (j.contains("bounds")) {
      c.bound_standard = c.bound_alp = c.bound_hier = false;
      for (const auto& name : j["bounds"]) {
        const std::string s = name.get<std::string>();
        if (s == "standard")
          c.bound_standard = true;
        else if (s == "alp")
          c.bound_alp = true;
        else if (s == "hier")
          c.bound_hier = true;
        else
          throw ConfigError("unknown bound '" + s + "'");
      }
    }
    c.fom_solver = j.value("fom_solver", c.fom_solver);
    c.seed = j.value("seed", c.seed);
    c.oracle_limit = j.value("oracle_limit", c.oracle_limit);
    c.dense_limit = j.value("dense_limit", c.dense_limit);
    if (j.contains("tolerances")) {
      c.tol.tol_struct = j["tolerances"].value("tol_struct", c.tol.tol_struct);
      c.tol.tol_psd = j["tolerances"].value("tol_psd", c.tol.tol_psd);
    }
    if (j.contains("prop1")) {
      c.prop1_tol = j["prop1"].value("tol", c.prop1_tol);
      c.prop1_extension = j["prop1"].value("extension", c.prop1_extension);
      c.prop1_x0 = j["prop1"].value("x0", c.prop1_x0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (c.fom_solver != "oracle" && c.fom_solver != "midpoint")
    throw ConfigError("fom_solver must be 'oracle' or 'midpoint'");
  if (!(c.t_end > c.t_begin) || c.n_steps < 1)
    throw ConfigError("grid must satisfy t_end > t_begin and n_steps >= 1");
  if (c.n < 1 || c.n_alp <= c.n || c.n_hier <= c.n)
    throw ConfigError("basis sizes must satisfy 1 <= n < n_alp, n < n_hier");
  return c;
}

inline InputSignal make_signal(const SignalSpec& spec, Index dim) {
  if (spec.type == "zero") return InputSignal::zero(dim);
  return InputSignal::sinusoid(spec.amplitude, spec.frequency, spec.phase, dim);
}

/// FNV-1a over the canonical config serialization; identifies a run setup.
inline std::string config_fingerprint(const ExperimentConfig& c) {
  const std::string s = config_to_json(c).dump();
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

struct StageTiming {
  std::string stage;
  double seconds;
};

/// Error annotated with the pipeline stage it occurred in and the process
/// exit code it maps to.
class StageError : public Error {
 public:
  StageError(std::string stage, int exit_code, const std::string& message)
      : Error("stage " + stage + ": " + message),
        stage_(std::move(stage)),
        exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const DenseLimitExceeded*>(&e))
    return 4;
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  return 3;  // numerical / validation failures
}

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename Fn>
  auto run(const std::string& name, Fn&& fn) -> decltype(fn()) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(name, t0);
      } else {
        auto result = fn();
        record(name, t0);
        return result;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, exit_code_for(e), e.what());
    }
  }

 private:
  void record(const std::string& name,
              std::chrono::steady_clock::time_point t0) {
    const auto dt = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0);
    sink_.push_back({name, dt.count()});
  }

  std::vector<StageTiming>& sink_;
};

}  // namespace detail

/// Builds the configured model.
inline PHSystem build_model(const ExperimentConfig& cfg) {
  if (cfg.model_type == "msd_chain")
    return generate_msd_chain(cfg.chain.n_masses, cfg.chain.mass,
                              cfg.chain.stiffness, cfg.chain.damping);
  return load_model(cfg.model_manifest, cfg.dense_limit, cfg.tol).system;
}

/// Everything a benchmark run produces, ready for CSV emission.
struct BenchmarkRun {
  Index full_dim = 0;
  double dt = 0.0;
  double effectivity_floor = 0.0;

  BoundSeries true_error{TimeGrid(0, 1, 1), Vector::Zero(2), BoundKind::TrueError, "true_error"};
  std::optional<BoundSeries> standard;
  std::optional<BoundWithComponents> alp;
  std::optional<BoundWithComponents> hier;
  std::optional<EffectivityResult> eff_standard;
  std::optional<EffectivityResult> eff_alp;
  std::optional<EffectivityResult> eff_hier;

  std::vector<StageTiming> timings;
};

/// End-to-end protocol: train on one input, build the bases (primal POD,
/// hierarchical extension, ALP from error snapshots), then evaluate all
/// requested bounds and effectivities against the test input.
inline BenchmarkRun run_benchmark(const ExperimentConfig& cfg) {
  BenchmarkRun out;
  detail::StageClock clock(out.timings);

  const PHSystem sys = clock.run("model", [&] { return build_model(cfg); });
  out.full_dim = sys.dim();
  if (cfg.n_alp > sys.dim() || cfg.n_hier > sys.dim() || cfg.n > sys.dim())
    throw StageError("model", 2, "basis sizes exceed the model dimension");

  const TimeGrid grid(cfg.t_begin, cfg.t_end, cfg.n_steps);
  out.dt = grid.dt();
  const InputSignal u_train = make_signal(cfg.train_input, sys.n_inputs());
  const InputSignal u_test = make_signal(cfg.test_input, sys.n_inputs());
  const FomSolver fom =
      cfg.fom_solver == "oracle" ? FomSolver::Oracle : FomSolver::Midpoint;

  // Bounds with a nonzero initial error are out of scope; require x0 inside
  // the training data so the primal basis can represent it.
  const Trajectory x_train = clock.run("train_solve", [&] {
    return detail::solve_full(sys, u_train, grid, fom, cfg.oracle_limit);
  });

  struct Bases {
    Basis primal, hier, alp;
  };
  const Bases bases = clock.run("basisgen", [&]() -> Bases {
    const SnapshotSet snaps = snapshots_from_trajectory(x_train);
    Basis primal = pod_state(snaps, sys, cfg.n);
    Basis hier = extend_hierarchical(primal, snaps, sys, cfg.n_hier);
    const ReducedPHSystem rom_train = reduce(sys, primal);
    const SnapshotSet err_snaps = collect_error_snapshots(
        sys, rom_train, u_train, grid,
        fom == FomSolver::Oracle ? FomSolver::Oracle : FomSolver::Midpoint,
        cfg.oracle_limit);
    Basis alp = alp_basis_from_errors(err_snaps, sys, cfg.n_alp);
    return {std::move(primal), std::move(hier), std::move(alp)};
  });

  if (sys.x0().norm() > 0.0) {
    const Projector proj(sys, bases.primal);
    if (energy_norm(sys, proj.apply(sys.x0())) >
        1e-8 * energy_norm(sys, sys.x0()))
      throw StageError("basisgen", 3,
                       "initial state is not contained in the primal basis");
  }

  const ReducedPHSystem rom = reduce(sys, bases.primal);
  const Trajectory xr = clock.run("rom_solve", [&] {
    return solve_implicit_midpoint(rom.to_lti(), u_test, grid);
  });

  const Trajectory x_test = clock.run("test_solve", [&] {
    return detail::solve_full(sys, u_test, grid, fom, cfg.oracle_limit);
  });
  out.true_error = clock.run("truth", [&] {
    return true_error_series(sys, rom, u_test, grid, fom, &xr, cfg.oracle_limit,
                             &x_test);
  });

  if (cfg.bound_standard)
    out.standard = clock.run("standard_bound", [&] {
      auto res = primal_residual_norms(sys, rom, xr, u_test);
      BoundSeries b = standard_bound(res);
      b.n_primal = rom.dim();
      return b;
    });

  if (cfg.bound_alp)
    out.alp = clock.run("alp_bound", [&] {
      const ReducedPHSystem alp_rom = reduced_error_system(sys, bases.alp);
      return alp_bound(sys, rom, alp_rom, u_test, grid, &xr);
    });

  if (cfg.bound_hier)
    out.hier = clock.run("hier_bound", [&] {
      const ReducedPHSystem hier_rom = reduce(sys, bases.hier);
      return hierarchical_bound(sys, rom, hier_rom, u_test, grid, &xr);
    });

  clock.run("effectivity", [&] {
    // Floor guards the 0/0 at t0 where the reduction error vanishes.
    double max_state_norm = 0.0;
    for (Index k = 0; k < grid.n_points(); ++k)
      max_state_norm =
          std::max(max_state_norm, energy_norm(sys, x_test.state(k)));
    out.effectivity_floor = 1e-14 * max_state_norm;
    if (out.effectivity_floor <= 0.0) out.effectivity_floor = 1e-300;
    if (out.standard)
      out.eff_standard = effectivity(*out.standard, out.true_error, out.effectivity_floor);
    if (out.alp)
      out.eff_alp = effectivity(out.alp->bound, out.true_error, out.effectivity_floor);
    if (out.hier)
      out.eff_hier = effectivity(out.hier->bound, out.true_error, out.effectivity_floor);
  });

  return out;
}

namespace detail {

inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void append_series(std::ofstream& out, const BoundSeries& s) {
  for (Index k = 0; k < s.values.size(); ++k)
    out << csv_double(s.grid.time(k)) << "," << s.label << ","
        << csv_double(s.values[k]) << "\n";
}

inline void append_effectivity(std::ofstream& out, const EffectivityResult& e) {
  auto skipped = e.skipped.begin();
  for (Index k = 0; k < e.series.values.size(); ++k) {
    if (skipped != e.skipped.end() && *skipped == k) {
      ++skipped;
      continue;
    }
    out << csv_double(e.series.grid.time(k)) << "," << e.series.label << ","
        << csv_double(e.series.values[k]) << "\n";
  }
}

inline void check_rigor_at_emission(const EffectivityResult& e) {
  auto skipped = e.skipped.begin();
  for (Index k = 0; k < e.series.values.size(); ++k) {
    if (skipped != e.skipped.end() && *skipped == k) {
      ++skipped;
      continue;
    }
    if (e.series.values[k] < 1.0 - 1e-6)
      throw Error("rigor violated at emission: " + e.series.label + " = " +
                  csv_double(e.series.values[k]) + " at t = " +
                  csv_double(e.series.grid.time(k)));
  }
}

}  // namespace detail

/// Writes bounds.csv, components.csv, effectivities.csv, summary.csv and
/// manifest.json into `outdir`. Every emitted effectivity row is re-checked
/// against the rigor property before anything is written.
inline void write_artifacts(const BenchmarkRun& run, const ExperimentConfig& cfg,
                            const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);

  for (const auto* eff : {&run.eff_standard, &run.eff_alp, &run.eff_hier})
    if (eff->has_value()) detail::check_rigor_at_emission(**eff);

  {
    std::ofstream out(fs::path(outdir) / "bounds.csv");
    if (!out) throw IoError("cannot write bounds.csv");
    out << "time,series,value\n";
    detail::append_series(out, run.true_error);
    if (run.standard) detail::append_series(out, *run.standard);
    if (run.alp) detail::append_series(out, run.alp->bound);
    if (run.hier) detail::append_series(out, run.hier->bound);
  }
  {
    std::ofstream out(fs::path(outdir) / "components.csv");
    if (!out) throw IoError("cannot write components.csv");
    out << "time,series,value\n";
    if (run.alp) {
      detail::append_series(out, run.alp->state_component);
      detail::append_series(out, run.alp->residual_component);
    }
    if (run.hier) {
      detail::append_series(out, run.hier->state_component);
      detail::append_series(out, run.hier->residual_component);
    }
  }
  {
    std::ofstream out(fs::path(outdir) / "effectivities.csv");
    if (!out) throw IoError("cannot write effectivities.csv");
    out << "time,series,value\n";
    if (run.eff_standard) detail::append_effectivity(out, *run.eff_standard);
    if (run.eff_alp) detail::append_effectivity(out, *run.eff_alp);
    if (run.eff_hier) detail::append_effectivity(out, *run.eff_hier);
  }
  {
    std::ofstream out(fs::path(outdir) / "summary.csv");
    if (!out) throw IoError("cannot write summary.csv");
    out << "bound,max_effectivity,n_primal,n_secondary\n";
    if (run.eff_standard)
      out << "standard," << detail::csv_double(run.eff_standard->max_effectivity)
          << "," << cfg.n << ",\n";
    if (run.eff_alp)
      out << "alp," << detail::csv_double(run.eff_alp->max_effectivity) << ","
          << cfg.n << "," << cfg.n_alp << "\n";
    if (run.eff_hier)
      out << "hier," << detail::csv_double(run.eff_hier->max_effectivity) << ","
          << cfg.n << "," << cfg.n_hier << "\n";
  }
  {
    nlohmann::json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["config_fingerprint"] = config_fingerprint(cfg);
    manifest["full_dimension"] = run.full_dim;
    manifest["dt"] = run.dt;
    manifest["effectivity_floor"] = run.effectivity_floor;
    manifest["exp_constant"] = 1.0;
    manifest["columns"] = {
        {"bounds.csv", "long format: time [s], series name, bound or true error value (H-norm)"},
        {"components.csv", "long format: time [s], component name, value (H-norm or its running integral)"},
        {"effectivities.csv", "long format: time [s], series name, bound/true-error ratio; floored points omitted"},
        {"summary.csv", "wide format: bound name, worst-case effectivity over the grid, basis sizes"}};
    nlohmann::json times = nlohmann::json::array();
    for (const auto& t : run.timings)
      times.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    manifest["wall_times"] = times;
    std::ofstream out(fs::path(outdir) / "manifest.json");
    if (!out) throw IoError("cannot write manifest.json");
    out << manifest.dump(2) << "\n";
  }
}

/// Assembles primal basis and extension block for the equivalence check and
/// runs it. The extension source and the initial state are configurable so
/// both the asserted regimes and the negative control are reachable.
inline Prop1Report run_prop1(const ExperimentConfig& cfg) {
  std::vector<StageTiming> timings;
  detail::StageClock clock(timings);

  PHSystem sys = clock.run("model", [&] { return build_model(cfg); });
  const TimeGrid grid(cfg.t_begin, cfg.t_end, cfg.n_steps);
  const InputSignal u_train = make_signal(cfg.train_input, sys.n_inputs());
  const InputSignal u_test = make_signal(cfg.test_input, sys.n_inputs());
  const FomSolver fom =
      cfg.fom_solver == "oracle" ? FomSolver::Oracle : FomSolver::Midpoint;
  if (cfg.n_alp != cfg.n_hier)
    throw StageError("model", 2, "equivalence mode requires n_alp == n_hier");

  return clock.run("prop1", [&] {
    const Trajectory x_train =
        detail::solve_full(sys, u_train, grid, fom, cfg.oracle_limit);
    const SnapshotSet snaps = snapshots_from_trajectory(x_train);
    const Basis primal = pod_state(snaps, sys, cfg.n);

    Matrix v_plus;
    if (cfg.prop1_extension == "pod" || cfg.prop1_extension == "scaled") {
      const Basis ext = extend_hierarchical(primal, snaps, sys, cfg.n_hier);
      v_plus = ext.V.rightCols(cfg.n_hier - cfg.n);
      if (cfg.prop1_extension == "scaled")
        for (Index j = 0; j < v_plus.cols(); ++j)
          v_plus.col(j) *= 2.0 + static_cast<double>(j);
    } else if (cfg.prop1_extension == "error_pod") {
      const ReducedPHSystem rom_train = reduce(sys, primal);
      const SnapshotSet err_snaps = collect_error_snapshots(
          sys, rom_train, u_train, grid, fom, cfg.oracle_limit);
      v_plus = alp_basis_from_errors(err_snaps, sys, cfg.n_hier - cfg.n).V;
    } else {
      throw ConfigError("prop1 extension must be pod, scaled or error_pod");
    }

    if (cfg.prop1_x0 == "span_v") {
      Vector coeff(primal.size());
      for (Index i = 0; i < coeff.size(); ++i)
        coeff[i] = 1.0 / static_cast<double>(i + 1);
      sys = sys.with_initial_state(primal.V * coeff);
    } else if (cfg.prop1_x0 == "random") {
      std::mt19937_64 rng(cfg.seed + 1);
      std::normal_distribution<double> gauss;
      Vector x0(sys.dim());
      for (Index i = 0; i < x0.size(); ++i) x0[i] = gauss(rng);
      sys = sys.with_initial_state(x0 / energy_norm(sys, x0));
    } else if (cfg.prop1_x0 != "zero") {
      throw ConfigError("prop1 x0 must be zero, span_v or random");
    }

    return certify_prop1(sys, primal, v_plus, u_test, grid, cfg.prop1_tol);
  });
}

}  // namespace phmor
