// flexbeam command-line front end. Talks to the library only through flexbeam.h.
#include "flexbeam/flexbeam.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kConstraint = 1, kUsage = 2, kFailure = 5 };

int exit_for(flexbeam_status st) {
    switch (st) {
        case FLEXBEAM_OK: return kOk;
        case FLEXBEAM_E_CONSTRAINT: return kConstraint;
        case FLEXBEAM_E_PARSE:
        case FLEXBEAM_E_INVALID_ARGUMENT: return kUsage;
        default: return kFailure;
    }
}

int report(flexbeam_status st) {
    std::fprintf(stderr, "flexbeam: %s error: %s\n", flexbeam_status_name(st), flexbeam_last_error());
    return exit_for(st);
}

struct Options {
    std::string config;
    std::string out;
    int n_modes = 0;
    std::string param;
    double from = 0.0;
    double to = 0.0;
    long steps = 0;
};

int run(const std::string& command, const Options& opt) {
    flexbeam_config* cfg = nullptr;
    flexbeam_status st = flexbeam_config_load(opt.config.c_str(), &cfg);
    if (st != FLEXBEAM_OK) return report(st);

    if (!opt.out.empty()) st = flexbeam_config_set_output_dir(cfg, opt.out.c_str());
    if (st == FLEXBEAM_OK && opt.n_modes > 0) st = flexbeam_config_set_n_modes(cfg, opt.n_modes);
    if (st != FLEXBEAM_OK) {
        flexbeam_config_free(cfg);
        return report(st);
    }

    flexbeam_result* res = nullptr;
    st = flexbeam_run(cfg, command.c_str(), command == "sweep" ? opt.param.c_str() : nullptr, opt.from, opt.to,
                      opt.steps, &res);
    if (st != FLEXBEAM_OK) {
        flexbeam_config_free(cfg);
        return report(st);
    }
    std::fputs(flexbeam_result_summary(res), stdout);
    if (command == "validate") {
        std::size_t needed = 0;
        flexbeam_config_serialize(cfg, nullptr, 0, &needed);
        std::vector<char> text(needed);
        if (flexbeam_config_serialize(cfg, text.data(), text.size(), &needed) == FLEXBEAM_OK)
            std::printf("\n# effective config\n%s", text.data());
    }
    const int code = flexbeam_result_exit_code(res);
    flexbeam_result_free(res);
    flexbeam_config_free(cfg);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simply supported beam with shaker and piezo actuators: spectra, modes, certification, simulation"};
    app.set_version_flag("--version", std::string(flexbeam_version()));
    app.require_subcommand(1, 1);

    Options opt;
    std::string chosen;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "check the config and echo the effective config"},
        {"spectrum", "roots of the truncated and full frequency equations"},
        {"modes", "mass-normalized mode shape table"},
        {"certify", "per-mode coupling report and verdict (exit 0 certified, 3 uncontrollable, 4 indeterminate)"},
        {"simulate", "closed-loop modal trajectory and decay summary"},
        {"sweep", "certify over a one-parameter grid"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (overrides output.directory)");
        sub->add_option("--n-modes", opt.n_modes, "retained modes (overrides spectral.n_modes)")
            ->check(CLI::PositiveNumber);
        if (name == "sweep") {
            sub->add_option("--param", opt.param, "beam.E|I|rho|l, shaker.m|kappa|l0|alpha0, actuator[j].<field>")
                ->required();
            sub->add_option("--from", opt.from, "first parameter value")->required();
            sub->add_option("--to", opt.to, "last parameter value")->required();
            sub->add_option("--steps", opt.steps, "grid points (0 gives an empty table)")
                ->required()
                ->check(CLI::NonNegativeNumber);
        }
        sub->callback([&chosen, name = name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }
    return run(chosen, opt);
}
