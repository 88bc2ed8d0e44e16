#include "mesozeta/data_dir.hpp"

#include <cstdlib>

namespace mesozeta {

std::optional<std::filesystem::path> data_dir() {
  const char* v = std::getenv(kDataDirEnv);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

}  // namespace mesozeta
