#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bundler/cli.hpp"

namespace bundler {

const std::vector<std::string>& figure_ids();

// Writes fig<id>_*.csv and fig<id>.manifest.json under out_dir. Unknown ids
// raise a config error.
Files run_figure(const std::string& id, const std::filesystem::path& out_dir, int threads);

}  // namespace bundler
