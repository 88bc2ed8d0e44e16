#pragma once

#include <filesystem>
#include <optional>

namespace mesozeta {

inline constexpr const char* kDataDirEnv = "MESOZETA_DATA_DIR";

// Directory for cached zero tables and sieves, from MESOZETA_DATA_DIR.
std::optional<std::filesystem::path> data_dir();

}  // namespace mesozeta
