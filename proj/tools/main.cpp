#include "qsw/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

qsw::ExperimentConfig load_config(const std::string& path, const std::string& mode) {
    qsw::ExperimentConfig config = qsw::parse_config(read_file(path));
    if (!config.mode.empty() && config.mode != mode)
        throw std::invalid_argument("mode: config says '" + config.mode +
                                    "' but the subcommand is '" + mode + "'");
    config.mode = mode;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasifree quantum stochastic workbench"};
    app.require_subcommand(1);

    std::string suite = "all";
    double tol = 0.0;
    unsigned seed = 12345;
    auto* verify = app.add_subcommand("verify", "run the invariant suites");
    verify->add_option("--suite", suite, "all|algebra|fock|qsc|quasifree|walk")
        ->check(CLI::IsMember({"all", "algebra", "fock", "qsc", "quasifree", "walk"}));
    verify->add_option("--tol", tol, "override every row tolerance");
    verify->add_option("--seed", seed, "seed for randomized checks");

    std::string convergeConfig, convergeOut;
    auto* converge = app.add_subcommand("converge", "grid-refinement experiment, CSV out");
    converge->add_option("--config", convergeConfig, "JSON experiment file")->required();
    converge->add_option("--out", convergeOut, "CSV output path")->required();

    std::string dilateConfig;
    auto* dilate = app.add_subcommand("dilate", "report the dilation structure");
    dilate->add_option("--config", dilateConfig, "JSON experiment file")->required();

    std::string uniqueConfig;
    auto* uniqueness = app.add_subcommand("uniqueness", "report amplitude uniqueness");
    uniqueness->add_option("--config", uniqueConfig, "JSON experiment file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        qsw::ExperimentConfig config;
        if (verify->parsed()) {
            config.mode = "verify";
            config.suite = suite;
            config.seed = seed;
            if (tol > 0.0) {
                config.tol = tol;
                config.tolExplicit = true;
            }
        } else if (converge->parsed()) {
            config = load_config(convergeConfig, "converge");
            config.outPath = convergeOut;
        } else if (dilate->parsed()) {
            config = load_config(dilateConfig, "dilate");
        } else {
            config = load_config(uniqueConfig, "uniqueness");
        }

        const qsw::SuiteResult result = qsw::run_suite(config);
        std::fputs(result.report.c_str(), stdout);
        if (!result.csv.empty() && !config.outPath.empty()) {
            std::ofstream out(config.outPath);
            if (!out) throw std::invalid_argument("cannot write " + config.outPath);
            out << result.csv;
            std::printf("# wrote %s\n", config.outPath.c_str());
        }
        return result.exitStatus;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }
}
