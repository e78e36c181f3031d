#pragma once

#include "cqed/params.hpp"
#include "cqed/trajectories.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace cqed {

/// Scientific notation with 17 significant digits; round-trips every double.
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(std::string_view name) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Throws InvalidArgument on ragged rows or non-numeric cells.
CsvTable read_csv(const std::filesystem::path& path);

nlohmann::json to_json(const SystemParams& p);
/// Throws InvalidArgument on unknown keys.
SystemParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrajectoryConfig& c);
TrajectoryConfig trajectory_config_from_json(const nlohmann::json& j);

/// Columns t, then the record's observables; the configuration, jump log and
/// step statistics go to a sidecar with the extension replaced by .json.
void write_record(const std::filesystem::path& csv, const TrajectoryRecord& rec);
TrajectoryRecord read_record(const std::filesystem::path& csv);

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

}  // namespace cqed
