#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dnlkpp {

/// Shortest round-trip decimal representation (std::to_chars); keeps emitted
/// files byte-identical across runs.
std::string format_double(double v);

/// FNV-1a 64-bit content hash, hex-encoded.
std::string fnv1a64_hex(const std::string& bytes);

/// Run output directory with an exclusive lockfile and a manifest that lists
/// every emitted file with its content hash.
class OutputDir {
  public:
    explicit OutputDir(const std::filesystem::path& dir);
    ~OutputDir();
    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    const std::filesystem::path& path() const { return dir_; }

    /// Writes bytes and records the file in the manifest.
    void write_file(const std::string& name, const std::string& bytes);

    /// CSV convenience: header row + rows of formatted doubles.
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

    void write_json(const std::string& name, const nlohmann::json& j);

    /// Emits manifest.json; `partial` flags an interrupted artifact set.
    void finalize(const nlohmann::json& inputs, bool partial = false);

  private:
    std::filesystem::path dir_;
    std::filesystem::path lock_;
    nlohmann::json files_ = nlohmann::json::array();
    bool finalized_ = false;
};

}  // namespace dnlkpp
