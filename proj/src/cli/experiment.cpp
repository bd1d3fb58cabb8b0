#include "qdgate/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "qdgate/cli/io.hpp"

namespace qdgate::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string tag(const std::string& name, double value) { return name + "_" + format_number(value); }

void note(const RunOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << '\n';
}

json state_json(const QuantumState& psi) {
  json j = json::object();
  for (const auto& l : psi.basis().labels()) {
    const Complex c = psi.amplitude(l);
    j[l] = {c.real(), c.imag()};
  }
  return j;
}

CphaseOptions cphase_options(const ExperimentConfig& cfg) {
  CphaseOptions o;
  o.thresholds = cfg.thresholds;
  return o;
}

RunOutcome run_cphase_experiment(const ExperimentConfig& cfg, const fs::path& out) {
  const CphaseRun run = run_cphase(cfg.dots, cfg.envelope(), cfg.integrator, cphase_options(cfg));
  RunOutcome o;
  for (std::size_t i = 0; i < 4; ++i) {
    const fs::path f = out / ("cphase_branch_" + std::string(kComputationalLabels[i]) + ".csv");
    write_csv(f, trajectory_table(run.branches[i]));
    o.files.push_back(f);
  }
  json report = run.report;
  report["experiment"] = "cphase";
  const fs::path f = out / "cphase_report.json";
  write_json(f, report);
  o.files.push_back(f);
  o.warnings = run.report.warnings;
  o.summary = report;
  return o;
}

RunOutcome run_zrot_experiment(const ExperimentConfig& cfg, const fs::path& out) {
  ZGateParams z;
  z.free_time = cfg.free_time;
  z.pi_pulse = cfg.envelope();
  z.target_phase = cfg.target_phase;
  const double norm = std::hypot(cfg.input_a, cfg.input_b);
  const ZRotationResult r = run_z_rotation(cfg.dots, z, cfg.integrator, cfg.input_a / norm,
                                           cfg.input_b / norm, cfg.z_frame);
  RunOutcome o;
  const fs::path traj = out / "zrot_trajectory.csv";
  write_csv(traj, trajectory_table(r.trajectory));
  json report{{"experiment", "z_rotation"},
              {"frame", cfg.z_frame == ZFrame::Lab ? "lab" : "rwa"},
              {"free_time_ps", r.free_time},
              {"achieved_phase", r.achieved_phase},
              {"composite_phase", r.composite_phase},
              {"expected_phase", r.expected_phase},
              {"leakage", r.leakage},
              {"leakage_flagged", r.leakage_flagged},
              {"final_state", state_json(r.final_state)}};
  const fs::path f = out / "zrot_report.json";
  write_json(f, report);
  o.files = {traj, f};
  if (r.leakage_flagged) o.warnings.push_back("z_rotation: leakage into |X> above 1e-2");
  o.summary = report;
  return o;
}

json raman_json(const RamanParams& r, const RamanRun& run) {
  return json{{"experiment", "raman_x"},
              {"rabi", r.rabi},
              {"detuning", r.detuning},
              {"gamma", r.gamma},
              {"target_angle", r.target_angle},
              {"raman_rate", r.raman_rate()},
              {"estimated_gate_time_ps", run.estimated_gate_time},
              {"gate_time_ps", run.gate_time},
              {"fidelity", run.fidelity},
              {"lost_population", run.lost_population},
              {"populations",
               {{"0", run.populations[0]},
                {"1", run.populations[1]},
                {"e", run.populations[2]},
                {"s", run.populations[3]}}}};
}

RunOutcome run_raman_experiment(const ExperimentConfig& cfg, const fs::path& out) {
  const RamanRun run = run_raman_x(cfg.raman, cfg.integrator, cfg.raman_window);
  RunOutcome o;
  const fs::path traj = out / "raman_trajectory.csv";
  write_csv(traj, trajectory_table(run.trajectory));
  const json report = raman_json(cfg.raman, run);
  const fs::path f = out / "raman_report.json";
  write_json(f, report);
  o.files = {traj, f};
  o.summary = report;
  return o;
}

RunOutcome run_conditions_experiment(const ExperimentConfig& cfg, const fs::path& out) {
  const PulseEnvelope env = cfg.envelope();
  const ConditionReport r = check_conditions(cfg.dots, env, cfg.thresholds);
  json report = r;
  report["experiment"] = "conditions";
  report["rabi"] = env.peak();
  report["v_f"] = cfg.dots.v_f;
  report["v_xx"] = cfg.dots.v_xx;
  RunOutcome o;
  const fs::path f = out / "conditions_report.json";
  write_json(f, report);
  o.files = {f};
  if (!r.pass_biexciton) o.warnings.push_back("biexciton detuning condition not met");
  if (!r.pass_spectator) o.warnings.push_back("spectator detuning condition not met");
  o.summary = report;
  return o;
}

RunOutcome run_single(const ExperimentConfig& cfg, const fs::path& out) {
  RunOutcome o;
  switch (cfg.kind) {
    case ExperimentKind::Cphase: o = run_cphase_experiment(cfg, out); break;
    case ExperimentKind::ZRotation: o = run_zrot_experiment(cfg, out); break;
    case ExperimentKind::RamanX: o = run_raman_experiment(cfg, out); break;
    case ExperimentKind::Conditions: o = run_conditions_experiment(cfg, out); break;
    case ExperimentKind::Sweep: throw ConfigError("key 'kind': nested sweep");
  }
  if (has_figure_family(cfg)) {
    RunOutcome fig = emit_figure_data(cfg, out);
    o.files.insert(o.files.end(), fig.files.begin(), fig.files.end());
    o.warnings.insert(o.warnings.end(), fig.warnings.begin(), fig.warnings.end());
  }
  return o;
}

RunOutcome run_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  RunOutcome o;
  const std::vector<ExperimentConfig> children = sweep_children(cfg);
  if (children.empty()) {
    o.warnings.push_back("sweep over '" + cfg.sweep->parameter + "' has no values; nothing to do");
    o.summary = json::array();
    return o;
  }
  const std::size_t n = children.size();
  std::vector<RunOutcome> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<fs::path> dirs(n);
  for (std::size_t i = 0; i < n; ++i)
    dirs[i] = options.out_dir / tag(cfg.sweep->parameter, cfg.sweep->values[i]);

  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_single(children[i], dirs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  json summary = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    note(options, "sweep child " + dirs[i].filename().string() + " done");
    summary.push_back({{"parameter", cfg.sweep->parameter},
                       {"value", cfg.sweep->values[i]},
                       {"directory", dirs[i].filename().string()},
                       {"result", results[i].summary}});
    o.files.insert(o.files.end(), results[i].files.begin(), results[i].files.end());
    for (const auto& w : results[i].warnings)
      o.warnings.push_back(dirs[i].filename().string() + ": " + w);
  }
  const fs::path f = options.out_dir / "sweep_summary.json";
  write_json(f, summary);
  o.files.push_back(f);
  o.summary = std::move(summary);
  return o;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec || !fs::is_directory(options.out_dir))
    throw ConfigError("output directory '" + options.out_dir.string() + "' is not writable");
  note(options, "running " + to_string(cfg.kind));
  if (cfg.kind == ExperimentKind::Sweep) return run_sweep(cfg, options);
  return run_single(cfg, options.out_dir);
}

bool has_figure_family(const ExperimentConfig& cfg) {
  if (cfg.kind == ExperimentKind::Cphase) return !cfg.curve_ratios.empty();
  if (cfg.kind == ExperimentKind::RamanX)
    return !cfg.curve_gammas.empty() && !cfg.curve_detunings.empty();
  return false;
}

namespace {

RunOutcome emit_fig2(const ExperimentConfig& cfg, const fs::path& out) {
  RunOutcome o;
  json curves = json::array();
  for (double ratio : cfg.curve_ratios) {
    ExperimentConfig c = cfg;
    c.rabi = ratio * std::abs(cfg.dots.v_f);
    const CphaseRun run = run_cphase(c.dots, c.envelope(), c.integrator, cphase_options(c));
    const auto& times = run.branches[3].times;
    for (const auto& b : run.branches)
      if (b.times != times) throw NumericalError("fig2: branch sample grids differ");

    CsvTable phase, amplitude;
    phase.header = {"t_ps"};
    amplitude.header = {"t_ps"};
    for (const char* l : kComputationalLabels) {
      phase.header.push_back("phase_" + std::string(l));
      amplitude.header.push_back("amp_" + std::string(l));
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> prow{times[k]}, arow{times[k]};
      for (std::size_t i = 0; i < 4; ++i) {
        const auto& b = run.branches[i];
        prow.push_back(run.phases[i].phase[k]);
        arow.push_back(std::abs(b.states[k](static_cast<Eigen::Index>(
            b.basis.index(kComputationalLabels[i])))));
      }
      phase.rows.push_back(std::move(prow));
      amplitude.rows.push_back(std::move(arow));
    }
    const fs::path pf = out / ("fig2_phase_" + tag("ratio", ratio) + ".csv");
    const fs::path af = out / ("fig2_amplitude_" + tag("ratio", ratio) + ".csv");
    write_csv(pf, phase);
    write_csv(af, amplitude);
    o.files.push_back(pf);
    o.files.push_back(af);
    for (const auto& w : run.report.warnings) o.warnings.push_back(tag("ratio", ratio) + ": " + w);
    curves.push_back({{"ratio", ratio},
                      {"rabi", c.rabi},
                      {"gate_time_ps", run.report.gate_time},
                      {"theta", run.report.theta},
                      {"fidelity", run.report.fidelity},
                      {"phase_file", pf.filename().string()},
                      {"amplitude_file", af.filename().string()}});
  }
  json schema{
      {"family", "fig2"},
      {"swept", "ratio = rabi / v_f"},
      {"files",
       {{"fig2_phase_ratio_<ratio>.csv",
         {{"t_ps", "time in ps"},
          {"phase_<l>", "unwrapped rotating-frame phase of <l|psi_l(t)> in rad, for input branch l"}}},
        {"fig2_amplitude_ratio_<ratio>.csv",
         {{"t_ps", "time in ps"}, {"amp_<l>", "|<l|psi_l(t)>| for input branch l"}}}}},
      {"curves", std::move(curves)}};
  const fs::path sf = out / "fig2_schema.json";
  write_json(sf, schema);
  o.files.push_back(sf);
  return o;
}

RunOutcome emit_fig3(const ExperimentConfig& cfg, const fs::path& out) {
  RunOutcome o;
  json curves = json::array();
  for (double gamma : cfg.curve_gammas)
    for (double nu : cfg.curve_detunings) {
      RamanParams r = cfg.raman;
      r.gamma = gamma;
      r.detuning = nu;
      const RamanRun run = run_raman_x(r, cfg.integrator, cfg.raman_window);
      const fs::path f = out / ("fig3_" + tag("gamma", gamma) + "_" + tag("nu", nu) + ".csv");
      write_csv(f, trajectory_table(run.trajectory));
      o.files.push_back(f);
      json entry = raman_json(r, run);
      entry.erase("experiment");
      entry["file"] = f.filename().string();
      curves.push_back(std::move(entry));
    }
  json schema{{"family", "fig3"},
              {"swept", "gamma (1/ps) x nu (meV) at fixed raman_rabi"},
              {"files",
               {{"fig3_gamma_<gamma>_nu_<nu>.csv",
                 {{"t_ps", "time in ps"},
                  {"pop_<l>", "population of level l in {0, 1, e, s}"},
                  {"coh_<a>_<b>", "|rho_ab|"}}}}},
              {"curves", std::move(curves)}};
  const fs::path sf = out / "fig3_schema.json";
  write_json(sf, schema);
  o.files.push_back(sf);
  return o;
}

void verify_file(const fs::path& path, VerifyReport& report) {
  const CsvTable t = read_csv(path);
  auto col = [&](const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    return it == t.header.end() ? -1 : static_cast<long>(it - t.header.begin());
  };
  std::vector<std::pair<long, long>> amps;
  std::vector<std::string> pop_labels;
  std::vector<long> amp_only;
  for (const auto& h : t.header) {
    if (h.rfind("re_", 0) == 0) amps.emplace_back(col(h), col("im_" + h.substr(3)));
    if (h.rfind("pop_", 0) == 0) pop_labels.push_back(h.substr(4));
    if (h.rfind("amp_", 0) == 0) amp_only.push_back(col(h));
  }
  if (amps.empty() && pop_labels.empty() && amp_only.empty()) return;
  ++report.files_checked;
  auto fail = [&](std::size_t row, const std::string& what) {
    report.violations.push_back(path.string() + " row " + std::to_string(row + 2) + ": " + what);
  };
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    ++report.rows_checked;
    if (!amps.empty()) {
      double n2 = 0.0;
      for (auto [re, im] : amps) n2 += row[re] * row[re] + (im >= 0 ? row[im] * row[im] : 0.0);
      if (std::abs(std::sqrt(n2) - 1.0) > kVerifyNormTol)
        fail(k, "norm " + format_number(std::sqrt(n2)));
    }
    for (long c : amp_only)
      if (row[c] > 1.0 + kVerifyNormTol) fail(k, "amplitude above 1");
    if (!pop_labels.empty()) {
      double trace = 0.0;
      for (const auto& l : pop_labels) {
        const double p = row[col("pop_" + l)];
        trace += p;
        if (p < kVerifyPopulationFloor) fail(k, "negative population pop_" + l);
      }
      if (std::abs(trace - 1.0) > kVerifyNormTol) fail(k, "trace " + format_number(trace));
      for (std::size_t a = 0; a < pop_labels.size(); ++a)
        for (std::size_t b = a + 1; b < pop_labels.size(); ++b) {
          const long c = col("coh_" + pop_labels[a] + "_" + pop_labels[b]);
          if (c < 0) continue;
          const double minor = row[col("pop_" + pop_labels[a])] * row[col("pop_" + pop_labels[b])] -
                               row[c] * row[c];
          if (minor < kVerifyPopulationFloor)
            fail(k, "coherence coh_" + pop_labels[a] + "_" + pop_labels[b] + " violates positivity");
        }
    }
  }
}

}  // namespace

RunOutcome emit_figure_data(const ExperimentConfig& cfg, const fs::path& out_dir) {
  if (cfg.kind == ExperimentKind::Cphase && !cfg.curve_ratios.empty()) return emit_fig2(cfg, out_dir);
  if (cfg.kind == ExperimentKind::RamanX && has_figure_family(cfg)) return emit_fig3(cfg, out_dir);
  return {};
}

VerifyReport verify_outputs(const fs::path& dir) {
  VerifyReport report;
  if (!fs::is_directory(dir)) {
    report.violations.push_back("'" + dir.string() + "' is not a directory");
    return report;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      verify_file(f, report);
    } catch (const std::exception& e) {
      report.violations.push_back(e.what());
    }
  }
  return report;
}

}  // namespace qdgate::cli
