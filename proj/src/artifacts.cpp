#include "dnlkpp/artifacts.hpp"

#include <charconv>
#include <fstream>

#include "dnlkpp/errors.hpp"

namespace dnlkpp {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

OutputDir::OutputDir(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
    lock_ = dir_ / ".lock";
    std::error_code ec;
    if (std::filesystem::exists(lock_))
        throw config_error("output directory is locked by another run: " + dir_.string());
    std::ofstream f(lock_);
    if (!f) throw config_error("cannot create lockfile in " + dir_.string());
    f << "locked\n";
}

OutputDir::~OutputDir() {
    std::error_code ec;
    std::filesystem::remove(lock_, ec);
}

void OutputDir::write_file(const std::string& name, const std::string& bytes) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot write " + path.string());
    f.write(bytes.data(), std::streamsize(bytes.size()));
    f.close();
    files_.push_back({{"name", name},
                      {"bytes", bytes.size()},
                      {"fnv1a64", fnv1a64_hex(bytes)}});
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        out += header[i];
        out += (i + 1 < header.size()) ? ',' : '\n';
    }
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            out += format_double(row[i]);
            out += (i + 1 < row.size()) ? ',' : '\n';
        }
    }
    write_file(name, out);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& j) {
    write_file(name, j.dump(2) + "\n");
}

void OutputDir::finalize(const nlohmann::json& inputs, bool partial) {
    nlohmann::json manifest;
    manifest["inputs"] = inputs;
    manifest["files"] = files_;
    manifest["partial"] = partial;
    const auto path = dir_ / "manifest.json";
    std::ofstream f(path);
    f << manifest.dump(2) << "\n";
    finalized_ = true;
}

}  // namespace dnlkpp
