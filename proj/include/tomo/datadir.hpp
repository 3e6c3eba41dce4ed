#pragma once

#include <string>

namespace tomo {

/// Directory holding the bundled data tables. Resolution order: TOMOSIM_DATA
/// environment variable, the source-tree data/ directory baked in at build
/// time, then ./data.
std::string data_dir();

/// Full path of a bundled data file.
std::string data_file(const std::string& name);

}  // namespace tomo
