// flapkit command-line tool: rhythm generation, closed-loop simulation,
// contour fitting, morphometrics and test-stand analysis.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flapkit/config.hpp"
#include "flapkit/dispatch.hpp"
#include "flapkit/error.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    std::string out_dir;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "TOML-syntax config file");
    cmd->add_option("--set", args.overrides, "key=value override (repeatable)");
    cmd->add_option("--seed", args.seed, "seed for synthetic noise");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--jobs", args.jobs, "worker threads for sweeps");
}

int run_command(flapkit::cfg::Command command, const CommonArgs& args) {
    using namespace flapkit;
    cfg::RunConfig run;
    run.command = command;
    run.seed = args.seed;
    run.jobs = args.jobs;

    if (!args.out_dir.empty()) {
        run.out_dir = args.out_dir;
    } else if (const char* env = std::getenv("FLAPKIT_OUT")) {
        run.out_dir = std::filesystem::path(env) / cfg::command_name(command);
    } else {
        run.out_dir = ".";
    }

    if (!args.config_path.empty())
        run.config = cfg::Config::parse_file(args.config_path);
    for (const std::string& o : args.overrides) run.config.set_override(o);

    return cfg::dispatch(run);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flapping-wing control and analysis toolkit"};
    app.require_subcommand(1);

    struct Sub {
        flapkit::cfg::Command command;
        const char* help;
    };
    const std::vector<Sub> subs = {
        {flapkit::cfg::Command::StarGen, "generate a stroke-timing rhythm trajectory"},
        {flapkit::cfg::Command::CpgGen, "run the dual-wing oscillator and emit the stream"},
        {flapkit::cfg::Command::SimRun, "run one closed- or open-loop flight simulation"},
        {flapkit::cfg::Command::SimSweep, "fan a scenario out over a parameter list"},
        {flapkit::cfg::Command::FitContour, "fit a periodic spline to a wing contour"},
        {flapkit::cfg::Command::Metrics, "compute morphometric numbers"},
        {flapkit::cfg::Command::BenchAnalyze, "reduce a force-torque bench log"},
    };

    std::vector<CommonArgs> args(subs.size());
    std::vector<CLI::App*> cmds(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
        cmds[i] = app.add_subcommand(flapkit::cfg::command_name(subs[i].command),
                                     subs[i].help);
        add_common(cmds[i], args[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!cmds[i]->parsed()) continue;
        try {
            return run_command(subs[i].command, args[i]);
        } catch (const flapkit::ConfigParseError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return flapkit::cfg::kExitParseError;
        } catch (const flapkit::ValidationError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return flapkit::cfg::kExitValidationError;
        } catch (const flapkit::AdmissibilityError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return flapkit::cfg::kExitValidationError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return flapkit::cfg::kExitPipelineFault;
        }
    }
    return flapkit::cfg::kExitOk;
}
