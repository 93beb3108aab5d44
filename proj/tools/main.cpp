#include <string>

#include <CLI11.hpp>

#include "riskbounds/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dependence-uncertainty bounds for aggregated risk and quantile-based risk sharing"};
    app.require_subcommand(1);

    std::string config_path, output_path, sweep;
    int jobs = 1;

    const char* commands[] = {"bound", "ird", "qdiff", "share", "sharpness", "compare"};
    const char* blurbs[] = {
        "dependence-uncertainty bounds on a window average of the aggregate quantile",
        "worst-case inter-window difference of the aggregate",
        "worst-case inter-quantile difference of the aggregate",
        "risk sharing: inf-convolution, extremal allocation, dual problem",
        "bound vs rearrangement oracle with sharpness certification",
        "sweep the window length and tabulate bounds against the oracle"};
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(commands[i], blurbs[i]);
        sub->add_option("--config", config_path, "JSON job description")->required();
        sub->add_option("--output", output_path, "write the result document here");
        if (std::string(commands[i]) == "compare") {
            sub->add_option("--sweep", sweep, "sweep spec, e.g. s=0.05:0.95:0.05");
            sub->add_option("--jobs", jobs, "parallel sweep workers");
        }
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    return riskbounds::cli::run_command(command, config_path, output_path, sweep, jobs);
}
