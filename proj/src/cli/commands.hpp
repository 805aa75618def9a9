#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ringheom/config.hpp"

namespace ringheom::cli {

// Each command writes its artifacts under `out` and returns their names in
// the order written. Any failure throws; nothing is reported as written that
// was not.
std::vector<std::string> cmd_equilibrium(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::string> cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::string> cmd_current(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::string> cmd_kernel_check(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::string> cmd_converge(const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace ringheom::cli
