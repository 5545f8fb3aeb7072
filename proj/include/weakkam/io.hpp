#pragma once

#include "weakkam/discounted.hpp"
#include "weakkam/twist.hpp"

#include <json.hpp>

#include <filesystem>

namespace weakkam {

/// Validated run configuration: instance spec, command, tolerance and
/// schedule overrides, output directory. Unknown keys are rejected.
struct RunConfig {
    std::string command;
    nlohmann::json spec;
    std::filesystem::path out_dir;
};

RunConfig load_config(const std::filesystem::path& path, const std::string& command,
                      const std::string& out_override);

/// Builds a kernel from an instance document
/// {"type": "dense" | "circle" | "action", ...}; "inf" encodes +inf.
CostKernel instance_from_json(const nlohmann::json& j);

struct RunReport {
    std::string command;
    std::map<std::string, double> scalars;
    std::vector<std::string> files;
    std::map<std::string, bool> checks;
    double wall_clock_s = 0.0;

    bool all_checks_pass() const {
        for (auto& [k, v] : checks)
            if (!v) return false;
        return true;
    }
    nlohmann::json to_json() const;
};

/// Dispatches the command, writes CSV/JSON outputs under out_dir, returns
/// the report. check_only skips file emission and runs the invariant
/// checks alone.
RunReport run(const RunConfig& config, bool check_only = false);

/// CSV helpers: comma separator, '.' decimal, 17 significant digits.
std::string format_value(double v);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

}  // namespace weakkam
