#include "flapkit/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "flapkit/csv.hpp"
#include "flapkit/error.hpp"

namespace flapkit::io {

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file for checksum: " + path.string());
    std::uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    std::uint64_t seed, const cfg::Config& config,
                    const std::vector<std::filesystem::path>& outputs) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    j["version"] = "0.1.0";

    nlohmann::ordered_json cfgj = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config.values()) {
        std::visit([&](const auto& v) { cfgj[key] = v; }, value);
    }
    j["config"] = cfgj;

    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& p : outputs) {
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a_file(p)));
        outs.push_back({{"path", p.filename().string()},
                        {"bytes", std::filesystem::file_size(p)},
                        {"fnv1a64", hex}});
    }
    j["outputs"] = outs;

    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write manifest in " + out_dir.string());
    out << j.dump(2) << '\n';
}

}  // namespace flapkit::io
