#include "tomo/datadir.hpp"

#include <cstdlib>
#include <filesystem>

namespace tomo {

std::string data_dir() {
    if (const char* env = std::getenv("TOMOSIM_DATA"); env && *env) return env;
#ifdef TOMOSIM_SOURCE_DATA_DIR
    if (std::filesystem::exists(TOMOSIM_SOURCE_DATA_DIR)) return TOMOSIM_SOURCE_DATA_DIR;
#endif
    return "data";
}

std::string data_file(const std::string& name) {
    return (std::filesystem::path(data_dir()) / name).string();
}

}  // namespace tomo
