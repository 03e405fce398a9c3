#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dvnet/error.hpp"

namespace dvnet {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Write-to-temp then rename, so concurrent writers never interleave bytes
/// and readers never observe a partial file.
inline void write_file_atomic(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    static std::atomic<unsigned> counter{0};
    const fs::path tmp = target.parent_path() /
                         (target.filename().string() + ".tmp" + std::to_string(counter++));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace dvnet
