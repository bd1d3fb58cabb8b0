#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "qdgate/cli/experiment.hpp"

namespace qdgate::cli {

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
  unsigned jobs = 1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config,-c", args.config, "Experiment config (JSON, comments allowed)");
  sub->add_option("--out,-o", args.out, "Output directory")->capture_default_str();
  sub->add_option("--set", args.overrides, "Override a config key: key=value (repeatable)")
      ->allow_extra_args(false);
  sub->add_option("--jobs,-j", args.jobs, "Worker threads for sweep children (0 = all cores)")
      ->capture_default_str();
}

ExperimentConfig resolve(const CommonArgs& args, ExperimentKind kind) {
  nlohmann::json doc = nlohmann::json::object();
  if (!args.config.empty()) doc = load_config(args.config).document;
  for (const auto& s : args.overrides) apply_override(doc, s);
  if (!doc.contains("kind") || doc["kind"].is_null()) doc["kind"] = to_string(kind);
  ExperimentConfig cfg = build_config(std::move(doc));
  if (cfg.kind != kind)
    throw ConfigError("key 'kind': config says '" + to_string(cfg.kind) + "' but the subcommand runs '" +
                      to_string(kind) + "'");
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation driver for optically driven quantum-dot gates", "qdgate"};
  app.require_subcommand(1);

  CommonArgs args;
  const std::vector<std::pair<std::string, ExperimentKind>> runs{
      {"cphase", ExperimentKind::Cphase},         {"zrot", ExperimentKind::ZRotation},
      {"raman", ExperimentKind::RamanX},          {"conditions", ExperimentKind::Conditions},
      {"sweep", ExperimentKind::Sweep},
  };
  const std::map<std::string, std::string> help{
      {"cphase", "Two-qubit conditional phase gate"},
      {"zrot", "Single-qubit Z rotation by free precession"},
      {"raman", "Raman X rotation on a Lambda system with decay"},
      {"conditions", "Validity ratios of the perturbative gate model"},
      {"sweep", "Run a child experiment over a list of parameter values"},
  };
  for (const auto& [name, kind] : runs) add_common(app.add_subcommand(name, help.at(name)), args);

  std::string verify_dir = ".";
  auto* verify = app.add_subcommand("verify", "Check norm/trace invariants of emitted CSVs");
  verify->add_option("--out,-o,dir", verify_dir, "Directory to scan")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (verify->parsed()) {
      const VerifyReport r = verify_outputs(verify_dir);
      constexpr std::size_t kShown = 20;
      for (std::size_t i = 0; i < std::min(kShown, r.violations.size()); ++i)
        err << "violation: " << r.violations[i] << '\n';
      if (r.violations.size() > kShown)
        err << "... " << r.violations.size() - kShown << " more violations\n";
      out << "verified " << r.rows_checked << " rows in " << r.files_checked << " files: "
          << (r.ok() ? "ok" : "FAILED") << '\n';
      return r.ok() ? 0 : 2;
    }
    for (const auto& [name, kind] : runs) {
      if (!app.got_subcommand(name)) continue;
      const ExperimentConfig cfg = resolve(args, kind);
      RunOptions options;
      options.out_dir = args.out;
      options.jobs = args.jobs;
      const RunOutcome o = run_experiment(cfg, options);
      for (const auto& w : o.warnings) err << "warning: " << w << '\n';
      for (const auto& f : o.files) out << f.string() << '\n';
    }
    return 0;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qdgate::cli
