// Deterministic text output: 17-significant-digit floats and atomic file
// writes (temp + rename) so partial artifacts are never observed.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "core/error.hpp"

namespace koop {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::io_error, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::io_error, "rename failed for " + path.string() + ": " + ec.message());
}

}  // namespace koop
