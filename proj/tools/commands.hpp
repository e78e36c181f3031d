#pragma once

#include "settings.hpp"

#include "cqed/io.hpp"
#include "cqed/trajectories.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cqed::cli {

inline const std::vector<std::string> commands = {"spectrum",   "squeezing",  "g2",           "steady-state",
                                                  "meanfield",  "trajectory", "bistability",  "figure"};
inline const std::vector<std::string> figures = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};

/// Collects the files a run writes, relative to the output directory.
class Output {
public:
    explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

    void csv(const std::string& name, const CsvTable& table);
    void json(const std::string& name, const nlohmann::json& j);
    void record(const std::string& name, const TrajectoryRecord& rec);

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

/// Settings with every key of `command` (and `figure`) at its default value.
Settings defaults_for(const std::string& command, const std::string& figure = "");

void run_command(const std::string& command, const std::string& figure, const Settings& s, Output& out);

}  // namespace cqed::cli
