#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace kpp {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kManifestSchema = "kpplab-manifest/1";

/// Lower-case hex SHA-256 of the file contents. Throws std::runtime_error if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// UTC time as 2026-01-01T00:00:00Z.
std::string utc_timestamp();

/// JSON run record. Layout:
///   schema, artifact_version, command, config (section.key -> text), config_text, seed, jobs,
///   started, finished, exit_code, warnings[], tasks[{name, status, message, ...}], results{},
///   outputs[{path (relative to the manifest directory), sha256, bytes}]
class Manifest {
public:
    explicit Manifest(std::filesystem::path dir);

    nlohmann::json& json() { return j_; }
    const nlohmann::json& json() const { return j_; }
    const std::filesystem::path& dir() const { return dir_; }

    void add_task(nlohmann::json task) { j_["tasks"].push_back(std::move(task)); }
    void warn(const std::string& w) { j_["warnings"].push_back(w); }

    /// Digests the file now; outputs are listed in the order they are added.
    void add_output(const std::filesystem::path& file);

    /// Writes manifest.json into dir().
    std::filesystem::path write() const;

private:
    std::filesystem::path dir_;
    nlohmann::json j_;
};

struct DigestCheck {
    std::string path;
    bool ok = false;
    std::string message;
};

/// Re-reads every listed output and compares size and digest.
std::vector<DigestCheck> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace kpp
