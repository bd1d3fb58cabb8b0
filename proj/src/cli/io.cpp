#include "qdgate/cli/io.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

namespace qdgate::cli {

using nlohmann::json;

std::string format_number(double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) +
         "_" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_file_atomic(path, render_csv(table));
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

CsvTable trajectory_table(const PureTrajectory& traj) {
  const auto& labels = traj.basis.labels();
  CsvTable t;
  t.header.push_back("t_ps");
  for (const auto& l : labels) {
    t.header.push_back("re_" + l);
    t.header.push_back("im_" + l);
  }
  std::vector<PhaseSeries> phases;
  for (const auto& l : labels) {
    bool defined = false;
    for (const auto& s : traj.states)
      if (std::abs(s(static_cast<Eigen::Index>(traj.basis.index(l)))) > kPhaseFloor) {
        defined = true;
        break;
      }
    if (!defined) continue;
    t.header.push_back("phase_" + l);
    phases.push_back(accumulated_phase(traj, l));
  }
  t.rows.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<double> row;
    row.reserve(t.header.size());
    row.push_back(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      row.push_back(traj.states[k](i).real());
      row.push_back(traj.states[k](i).imag());
    }
    for (const auto& ph : phases) row.push_back(ph.phase[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable trajectory_table(const MixedTrajectory& traj) {
  const auto& labels = traj.basis.labels();
  const auto n = static_cast<Eigen::Index>(labels.size());
  CsvTable t;
  t.header.push_back("t_ps");
  for (const auto& l : labels) t.header.push_back("pop_" + l);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      t.header.push_back("coh_" + labels[static_cast<std::size_t>(a)] + "_" +
                         labels[static_cast<std::size_t>(b)]);
  t.rows.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const MatrixXc& rho = traj.states[k];
    std::vector<double> row;
    row.reserve(t.header.size());
    row.push_back(traj.times[k]);
    for (Eigen::Index a = 0; a < n; ++a) row.push_back(rho(a, a).real());
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = a + 1; b < n; ++b) row.push_back(std::abs(rho(a, b)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": not a number: '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": column count differs from header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace qdgate::cli

namespace qdgate {

using nlohmann::json;

namespace {

template <typename T>
json labelled(const std::array<T, 4>& values) {
  json j = json::object();
  for (std::size_t i = 0; i < 4; ++i) j[kComputationalLabels[i]] = values[i];
  return j;
}

template <typename T>
std::array<T, 4> unlabelled(const json& j) {
  std::array<T, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = j.at(kComputationalLabels[i]).get<T>();
  return out;
}

}  // namespace

void to_json(json& j, const ConditionReport& r) {
  j = json{{"r_biexciton", r.r_biexciton},
           {"r_spectator", r.r_spectator},
           {"threshold_biexciton", r.threshold_biexciton},
           {"threshold_spectator", r.threshold_spectator},
           {"pass_biexciton", r.pass_biexciton},
           {"pass_spectator", r.pass_spectator},
           {"passed", r.passed()}};
}

void from_json(const json& j, ConditionReport& r) {
  j.at("r_biexciton").get_to(r.r_biexciton);
  j.at("r_spectator").get_to(r.r_spectator);
  j.at("threshold_biexciton").get_to(r.threshold_biexciton);
  j.at("threshold_spectator").get_to(r.threshold_spectator);
  j.at("pass_biexciton").get_to(r.pass_biexciton);
  j.at("pass_spectator").get_to(r.pass_spectator);
}

void to_json(json& j, const GateReport& r) {
  json block = json::array();
  for (Eigen::Index m = 0; m < 4; ++m) {
    json row = json::array();
    for (Eigen::Index n = 0; n < 4; ++n) row.push_back({r.block(m, n).real(), r.block(m, n).imag()});
    block.push_back(std::move(row));
  }
  j = json{{"phi", labelled(r.phi)},
           {"populations", labelled(r.populations)},
           {"leakage", labelled(r.leakage)},
           {"block", std::move(block)},
           {"theta", r.theta},
           {"fidelity", r.fidelity},
           {"gate_time_ps", r.gate_time},
           {"conditions", r.conditions},
           {"residuals", r.residuals},
           {"warnings", r.warnings}};
}

void from_json(const json& j, GateReport& r) {
  r.phi = unlabelled<double>(j.at("phi"));
  r.populations = unlabelled<double>(j.at("populations"));
  r.leakage = unlabelled<double>(j.at("leakage"));
  const json& block = j.at("block");
  for (Eigen::Index m = 0; m < 4; ++m)
    for (Eigen::Index n = 0; n < 4; ++n) {
      const json& c = block.at(static_cast<std::size_t>(m)).at(static_cast<std::size_t>(n));
      r.block(m, n) = Complex(c.at(0).get<double>(), c.at(1).get<double>());
    }
  j.at("theta").get_to(r.theta);
  j.at("fidelity").get_to(r.fidelity);
  j.at("gate_time_ps").get_to(r.gate_time);
  j.at("conditions").get_to(r.conditions);
  j.at("residuals").get_to(r.residuals);
  j.at("warnings").get_to(r.warnings);
}

}  // namespace qdgate
