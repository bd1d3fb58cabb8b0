#include "qdgate/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qdgate::cli {

using nlohmann::json;

namespace {

enum class KeyType { Number, OptionalNumber, String, OptionalString, NumberList };

struct KeySpec {
  const char* name;
  KeyType type;
  json default_value;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table{
      {"kind", KeyType::OptionalString, nullptr},
      {"omega_a", KeyType::Number, 2.0e6},
      {"v_f", KeyType::Number, 0.85},
      {"v_xx", KeyType::Number, 5.0},
      {"pulse_shape", KeyType::String, "square"},
      {"rabi", KeyType::Number, 0.1},
      {"pulse_area", KeyType::OptionalNumber, nullptr},
      {"gaussian_truncation", KeyType::Number, 4.0},
      {"rtol", KeyType::Number, 1e-9},
      {"atol", KeyType::Number, 1e-12},
      {"max_step", KeyType::Number, 1.0},
      {"sample_interval", KeyType::Number, 0.01},
      {"max_steps", KeyType::Number, 5.0e7},
      {"threshold_biexciton", KeyType::Number, 0.05},
      {"threshold_spectator", KeyType::Number, 0.05},
      {"free_time", KeyType::Number, 0.0},
      {"target_phase", KeyType::OptionalNumber, nullptr},
      {"zrot_frame", KeyType::String, "rwa"},
      {"input_a", KeyType::Number, 1.0 / std::sqrt(2.0)},
      {"input_b", KeyType::Number, 1.0 / std::sqrt(2.0)},
      {"raman_rabi", KeyType::Number, 1.33},
      {"raman_detuning", KeyType::Number, 8.0},
      {"raman_gamma", KeyType::Number, 1.0},
      {"raman_target_angle", KeyType::Number, kPi},
      {"raman_window", KeyType::OptionalNumber, nullptr},
      {"sweep_kind", KeyType::OptionalString, nullptr},
      {"sweep_param", KeyType::OptionalString, nullptr},
      {"sweep_values", KeyType::NumberList, json::array()},
      {"curve_ratios", KeyType::NumberList, json::array()},
      {"curve_gammas", KeyType::NumberList, json::array()},
      {"curve_detunings", KeyType::NumberList, json::array()},
  };
  return table;
}

const KeySpec* find_key(const std::string& name) {
  const auto& t = key_table();
  auto it = std::find_if(t.begin(), t.end(), [&](const KeySpec& k) { return name == k.name; });
  return it == t.end() ? nullptr : &*it;
}

void check_type(const KeySpec& spec, const json& v) {
  auto fail = [&](const char* expected) {
    throw ConfigError("key '" + std::string(spec.name) + "': expected " + expected + ", got " +
                      v.dump());
  };
  switch (spec.type) {
    case KeyType::Number:
      if (!v.is_number()) fail("a number");
      break;
    case KeyType::OptionalNumber:
      if (!v.is_number() && !v.is_null()) fail("a number or null");
      break;
    case KeyType::String:
      if (!v.is_string()) fail("a string");
      break;
    case KeyType::OptionalString:
      if (!v.is_string() && !v.is_null()) fail("a string or null");
      break;
    case KeyType::NumberList:
      if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); }))
        fail("a list of numbers");
      break;
  }
}

std::optional<double> optional_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("key '" + key + "': " + what);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Cphase: return "cphase";
    case ExperimentKind::ZRotation: return "z_rotation";
    case ExperimentKind::RamanX: return "raman_x";
    case ExperimentKind::Conditions: return "conditions";
    case ExperimentKind::Sweep: return "sweep";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  static const std::map<std::string, ExperimentKind> kinds{
      {"cphase", ExperimentKind::Cphase},         {"z_rotation", ExperimentKind::ZRotation},
      {"raman_x", ExperimentKind::RamanX},        {"conditions", ExperimentKind::Conditions},
      {"sweep", ExperimentKind::Sweep},
  };
  auto it = kinds.find(name);
  if (it == kinds.end()) throw ConfigError("unknown experiment kind '" + name + "'");
  return it->second;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.emplace_back(k.name);
    return out;
  }();
  return names;
}

bool is_sweepable(const std::string& key) {
  const KeySpec* spec = find_key(key);
  return spec && (spec->type == KeyType::Number || spec->type == KeyType::OptionalNumber);
}

PulseEnvelope ExperimentConfig::envelope() const {
  const bool z = kind == ExperimentKind::ZRotation;
  const double area_rad = pulse_area.value_or(z ? kPi : 2.0 * kPi);
  // Area in meV·ps of Ω itself; the CPHASE area is defined on Ω′ = √2·Ω.
  const double area = (z ? area_rad : area_rad / std::sqrt(2.0)) * kHbar;
  if (pulse_shape == "gaussian") {
    if (area == 0.0) return PulseEnvelope::gaussian(0.0, 1.0, gaussian_truncation);
    return PulseEnvelope::gaussian_with_area(rabi, area, gaussian_truncation);
  }
  return PulseEnvelope::square_with_area(rabi, area);
}

ExperimentConfig build_config(json doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    check_type(*spec, value);
  }
  for (const auto& spec : key_table())
    if (!doc.contains(spec.name)) doc[spec.name] = spec.default_value;

  ExperimentConfig c;
  if (doc["kind"].is_null()) throw ConfigError("key 'kind': experiment kind is required");
  c.kind = parse_kind(doc["kind"].get<std::string>());

  c.dots = {doc["omega_a"].get<double>(), doc["v_f"].get<double>(), doc["v_xx"].get<double>()};
  require(c.dots.omega_a > 0.0, "omega_a", "must be positive");
  require(c.dots.v_f != 0.0, "v_f", "must be non-zero");
  require(c.dots.biexciton_detuning() != 0.0, "v_xx", "must differ from 2*v_f");

  c.pulse_shape = doc["pulse_shape"].get<std::string>();
  require(c.pulse_shape == "square" || c.pulse_shape == "gaussian", "pulse_shape",
          "must be 'square' or 'gaussian'");
  c.rabi = doc["rabi"].get<double>();
  require(c.rabi >= 0.0, "rabi", "must be >= 0");
  c.pulse_area = optional_number(doc["pulse_area"]);
  require(!c.pulse_area || *c.pulse_area >= 0.0, "pulse_area", "must be >= 0");
  c.gaussian_truncation = doc["gaussian_truncation"].get<double>();
  require(c.gaussian_truncation > 0.0, "gaussian_truncation", "must be positive");

  c.integrator.rtol = doc["rtol"].get<double>();
  c.integrator.atol = doc["atol"].get<double>();
  c.integrator.max_step = doc["max_step"].get<double>();
  c.integrator.sample_interval = doc["sample_interval"].get<double>();
  const double max_steps = doc["max_steps"].get<double>();
  require(max_steps >= 1.0 && max_steps == std::floor(max_steps), "max_steps",
          "must be a positive integer");
  c.integrator.max_steps = static_cast<std::size_t>(max_steps);
  require(c.integrator.rtol > 0.0, "rtol", "must be positive");
  require(c.integrator.atol > 0.0, "atol", "must be positive");
  require(c.integrator.max_step > 0.0, "max_step", "must be positive");
  require(c.integrator.sample_interval > 0.0, "sample_interval", "must be positive");

  c.thresholds = {doc["threshold_biexciton"].get<double>(), doc["threshold_spectator"].get<double>()};
  require(c.thresholds.biexciton > 0.0, "threshold_biexciton", "must be positive");
  require(c.thresholds.spectator > 0.0, "threshold_spectator", "must be positive");

  c.free_time = doc["free_time"].get<double>();
  require(c.free_time >= 0.0, "free_time", "must be >= 0");
  c.target_phase = optional_number(doc["target_phase"]);
  const auto frame = doc["zrot_frame"].get<std::string>();
  require(frame == "rwa" || frame == "lab", "zrot_frame", "must be 'rwa' or 'lab'");
  c.z_frame = frame == "lab" ? ZFrame::Lab : ZFrame::Rwa;
  c.input_a = doc["input_a"].get<double>();
  c.input_b = doc["input_b"].get<double>();
  require(c.input_a != 0.0 || c.input_b != 0.0, "input_b", "input state must be non-zero");

  c.raman.rabi = doc["raman_rabi"].get<double>();
  c.raman.detuning = doc["raman_detuning"].get<double>();
  c.raman.gamma = doc["raman_gamma"].get<double>();
  c.raman.target_angle = doc["raman_target_angle"].get<double>();
  c.raman_window = optional_number(doc["raman_window"]);
  require(c.raman.rabi > 0.0, "raman_rabi", "must be positive");
  require(c.raman.detuning != 0.0, "raman_detuning", "must be non-zero");
  require(c.raman.gamma >= 0.0, "raman_gamma", "must be >= 0");
  require(!c.raman_window || *c.raman_window >= 0.0, "raman_window", "must be >= 0");

  auto numbers = [&](const char* key) { return doc[key].get<std::vector<double>>(); };
  c.curve_ratios = numbers("curve_ratios");
  c.curve_gammas = numbers("curve_gammas");
  c.curve_detunings = numbers("curve_detunings");
  for (double r : c.curve_ratios) require(r > 0.0, "curve_ratios", "entries must be positive");
  for (double g : c.curve_gammas) require(g >= 0.0, "curve_gammas", "entries must be >= 0");
  for (double d : c.curve_detunings) require(d != 0.0, "curve_detunings", "entries must be non-zero");

  if (c.kind == ExperimentKind::Sweep) {
    require(doc["sweep_kind"].is_string(), "sweep_kind", "required for a sweep");
    require(doc["sweep_param"].is_string(), "sweep_param", "required for a sweep");
    SweepAxis axis;
    axis.child_kind = parse_kind(doc["sweep_kind"].get<std::string>());
    require(axis.child_kind != ExperimentKind::Sweep, "sweep_kind", "sweeps cannot nest");
    axis.parameter = doc["sweep_param"].get<std::string>();
    require(is_sweepable(axis.parameter), "sweep_param",
            "'" + axis.parameter + "' is not a known numeric parameter");
    axis.values = numbers("sweep_values");
    c.sweep = std::move(axis);
  }
  c.document = std::move(doc);
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return build_config(std::move(doc));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

void apply_override(json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must have the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  document[key] = std::move(value);
}

std::vector<ExperimentConfig> sweep_children(const ExperimentConfig& cfg) {
  std::vector<ExperimentConfig> out;
  if (!cfg.sweep) return out;
  for (double v : cfg.sweep->values) {
    json doc = cfg.document;
    doc["kind"] = to_string(cfg.sweep->child_kind);
    doc[cfg.sweep->parameter] = v;
    doc["sweep_kind"] = nullptr;
    doc["sweep_param"] = nullptr;
    doc["sweep_values"] = json::array();
    out.push_back(build_config(std::move(doc)));
  }
  return out;
}

}  // namespace qdgate::cli
