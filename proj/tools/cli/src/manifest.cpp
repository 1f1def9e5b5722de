#include "ivtf_cli/manifest.hpp"

#include <fstream>

#include "ivtf/errors.hpp"

namespace ivtf::cli {

namespace {

nlohmann::json digests_to_json(const std::vector<FileDigest>& files)
{
    auto arr = nlohmann::json::array();
    for (const auto& f : files)
    {
        nlohmann::json e = {{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}};
        if (!f.role.empty())
            e["role"] = f.role;
        arr.push_back(std::move(e));
    }
    return arr;
}

std::vector<FileDigest> digests_from_json(const nlohmann::json& arr)
{
    std::vector<FileDigest> out;
    for (const auto& e : arr)
    {
        FileDigest f;
        f.role = e.value("role", "");
        f.path = e.at("path").get<std::string>();
        f.sha256 = e.at("sha256").get<std::string>();
        f.bytes = e.at("bytes").get<std::uintmax_t>();
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json j;
    j["tool"] = "ivtf";
    j["tool_version"] = tool_version;
    j["subcommand"] = subcommand;
    j["command"] = command;
    j["parameters"] = parameters;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    j["threads"] = threads;
    j["inputs"] = digests_to_json(inputs);
    j["outputs"] = digests_to_json(outputs);
    j["duration_seconds"] = duration_seconds;
    j["status"] = status;
    if (!error.empty())
        j["error"] = error;
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j)
{
    RunManifest m;
    try
    {
        m.tool_version = j.value("tool_version", "");
        m.subcommand = j.at("subcommand").get<std::string>();
        m.command = j.at("command").get<std::vector<std::string>>();
        m.parameters = j.value("parameters", nlohmann::json::object());
        if (j.contains("seed") && !j["seed"].is_null())
            m.seed = j["seed"].get<std::uint64_t>();
        m.threads = j.value("threads", 0u);
        m.inputs = digests_from_json(j.value("inputs", nlohmann::json::array()));
        m.outputs = digests_from_json(j.value("outputs", nlohmann::json::array()));
        m.duration_seconds = j.value("duration_seconds", 0.0);
        m.status = j.value("status", "ok");
        m.error = j.value("error", "");
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    return m;
}

void RunManifest::write(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

RunManifest RunManifest::read(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open manifest " + path.string());
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError("manifest " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace ivtf::cli
