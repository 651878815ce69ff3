#include "kpp/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace kpp {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char two[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(two, sizeof two, "%02x", md[i]);
        hex += two;
    }
    return hex;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Manifest::Manifest(fs::path dir) : dir_(std::move(dir)) {
    j_["schema"] = kManifestSchema;
    j_["artifact_version"] = kArtifactVersion;
    j_["warnings"] = nlohmann::json::array();
    j_["tasks"] = nlohmann::json::array();
    j_["results"] = nlohmann::json::object();
    j_["outputs"] = nlohmann::json::array();
}

void Manifest::add_output(const fs::path& file) {
    const fs::path rel = fs::relative(file, dir_);
    j_["outputs"].push_back({{"path", rel.generic_string()},
                             {"sha256", sha256_file(file)},
                             {"bytes", static_cast<std::uint64_t>(fs::file_size(file))}});
}

fs::path Manifest::write() const {
    const fs::path p = dir_ / "manifest.json";
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << j_.dump(2) << "\n";
    return p;
}

std::vector<DigestCheck> verify_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot read " + manifest_path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    if (j.value("schema", "") != kManifestSchema)
        throw std::runtime_error("unsupported manifest schema in " + manifest_path.string());
    const fs::path dir = manifest_path.parent_path();
    std::vector<DigestCheck> out;
    for (const auto& o : j.at("outputs")) {
        DigestCheck c;
        c.path = o.at("path").get<std::string>();
        const fs::path file = dir / c.path;
        if (!fs::exists(file)) {
            c.message = "missing";
        } else if (fs::file_size(file) != o.at("bytes").get<std::uint64_t>()) {
            c.message = "size changed";
        } else if (sha256_file(file) != o.at("sha256").get<std::string>()) {
            c.message = "digest mismatch";
        } else {
            c.ok = true;
            c.message = "ok";
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace kpp
