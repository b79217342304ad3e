#pragma once

// TOML-syntax configuration: tables, key = value pairs, numbers, booleans,
// strings and flat arrays — the subset the run configs use.  Keys flatten to
// dotted paths ("scenario.duration").  Values set on the command line with
// --set key=value override the file.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace flapkit::cfg {

using Value = std::variant<bool, std::int64_t, double, std::string,
                           std::vector<double>, std::vector<std::string>>;

class Config {
public:
    // Parses TOML-syntax text; throws ConfigParseError with line/column.
    static Config parse(const std::string& text);
    static Config parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    // typed getters with defaults; throw ValidationError on type mismatch
    double get_double(const std::string& key, double def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    std::vector<double> get_double_array(const std::string& key) const;

    // required variants: throw ValidationError when missing
    double require_double(const std::string& key) const;
    std::string require_string(const std::string& key) const;

    // applies a "key=value" override (value parsed as bool/int/float/string)
    void set_override(const std::string& assignment);

    const std::map<std::string, Value>& values() const { return values_; }

private:
    std::map<std::string, Value> values_;
};

enum class Command {
    StarGen,
    CpgGen,
    SimRun,
    SimSweep,
    FitContour,
    Metrics,
    BenchAnalyze,
};

std::string command_name(Command c);
std::optional<Command> command_from_name(const std::string& name);

struct RunConfig {
    Command command = Command::StarGen;
    Config config;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
};

// exit codes used by the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitPipelineFault = 1;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitValidationError = 3;

}  // namespace flapkit::cfg
