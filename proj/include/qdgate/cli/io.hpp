#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdgate/gates.hpp"

namespace qdgate::cli {

/// Formats with 12 significant digits.
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Comma-separated, LF-terminated rendering of a table.
std::string render_csv(const CsvTable& table);

/// Writes via a temporary sibling and rename, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// `t_ps`, `re_<l>`/`im_<l>` per level, then `phase_<l>` for every level
/// whose amplitude rises above the phase floor.
CsvTable trajectory_table(const PureTrajectory& traj);
/// `t_ps`, `pop_<l>` per level, then `coh_<a>_<b>` = |ρ_ab| for a < b.
CsvTable trajectory_table(const MixedTrajectory& traj);

/// Parses a numeric CSV with one header line.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace qdgate::cli

namespace qdgate {

void to_json(nlohmann::json& j, const ConditionReport& r);
void from_json(const nlohmann::json& j, ConditionReport& r);
void to_json(nlohmann::json& j, const GateReport& r);
void from_json(const nlohmann::json& j, GateReport& r);

}  // namespace qdgate
