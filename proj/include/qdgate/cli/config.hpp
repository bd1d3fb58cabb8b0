#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdgate/gates.hpp"

namespace qdgate::cli {

/// Malformed, unknown or out-of-range configuration. Maps to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Cphase, ZRotation, RamanX, Conditions, Sweep };

std::string to_string(ExperimentKind kind);
/// Accepts "cphase", "z_rotation", "raman_x", "conditions", "sweep".
ExperimentKind parse_kind(const std::string& name);

struct SweepAxis {
  ExperimentKind child_kind = ExperimentKind::Cphase;
  std::string parameter;
  std::vector<double> values;
};

/// Validated experiment description. `document` holds every key with
/// defaults filled in; typed fields are derived from it.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Cphase;
  DotPairParams dots;
  std::string pulse_shape = "square";
  double rabi = 0.1;
  std::optional<double> pulse_area;
  double gaussian_truncation = 4.0;
  IntegratorConfig integrator;
  ConditionThresholds thresholds;

  double free_time = 0.0;
  std::optional<double> target_phase;
  ZFrame z_frame = ZFrame::Rwa;
  double input_a = 0.0;
  double input_b = 0.0;

  RamanParams raman;
  std::optional<double> raman_window;

  std::optional<SweepAxis> sweep;
  std::vector<double> curve_ratios;
  std::vector<double> curve_gammas;
  std::vector<double> curve_detunings;

  nlohmann::json document;

  /// Drive envelope for cphase / conditions (2π in Ω′ by default) or the
  /// z_rotation π-pulse (π in Ω by default).
  PulseEnvelope envelope() const;
};

/// Names of all accepted keys, in documentation order.
const std::vector<std::string>& known_keys();
/// Keys whose values are numbers and may therefore be swept.
bool is_sweepable(const std::string& key);

/// Parses a flat JSON object (comments allowed). Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
/// Reads and parses a config file. Parse errors carry line and column.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Builds a config from an already-flat document (defaults filled, validated).
ExperimentConfig build_config(nlohmann::json document);

/// Applies `key=value`; the value is read as JSON when possible, else as a string.
void apply_override(nlohmann::json& document, const std::string& assignment);

/// One child config per sweep value, in list order.
std::vector<ExperimentConfig> sweep_children(const ExperimentConfig& cfg);

}  // namespace qdgate::cli
