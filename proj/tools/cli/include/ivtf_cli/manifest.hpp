#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ivtf::cli {

struct FileDigest
{
    std::string role;  // inputs: what the file is; outputs: empty
    std::string path;  // outputs: relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

/// Record of one run. `command` is the canonical argument list (every
/// resolved parameter spelled out, output directory omitted), so a run can be
/// repeated from the manifest alone.
struct RunManifest
{
    std::string tool_version;
    std::string subcommand;
    std::vector<std::string> command;
    nlohmann::json parameters = nlohmann::json::object();
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    double duration_seconds = 0.0;
    std::string status = "ok";
    std::string error;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);

    void write(const std::filesystem::path& path) const;
    static RunManifest read(const std::filesystem::path& path);
};

}  // namespace ivtf::cli
