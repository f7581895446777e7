// tclae_cli.cpp: command-line driver for the reference experiments

#include <iostream>

#include <CLI11.hpp>

#include "tclae/experiments.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

int main(int argc, char** argv) {
    CLI::App app{"TCL adiabatic elimination experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", format = "json";
    int threads = 0;
    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "BLAS threads (0 keeps the library default)")->check(CLI::NonNegativeNumber);

    const char* names[] = {"prop-verify", "rabi-truncation", "choi", "laplace-compare", "equivalence"};
    for (const char* n : names) app.add_subcommand(n, std::string("run the ") + n + " experiment")->fallthrough();

    CLI11_PARSE(app, argc, argv);
    const std::string experiment = app.get_subcommands().front()->get_name();

    try {
        if (threads > 0) openblas_set_num_threads(threads);
        tclae::ExperimentConfig cfg =
            config_path.empty() ? tclae::default_config(experiment) : tclae::load_config(config_path);
        if (cfg.experiment != experiment)
            throw tclae::Error(tclae::ErrorKind::Config,
                               "config is for " + cfg.experiment + ", subcommand is " + experiment);
        const tclae::ExperimentReport rep = tclae::run_experiment(cfg);
        const std::string dir = cfg.out_dir.empty() || app.get_option("--out")->count() ? out_dir : cfg.out_dir;
        tclae::write_report(rep, dir, format);
        for (const tclae::Check& c : rep.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured << " (" << c.bound
                      << ")\n";
        return rep.all_pass() ? 0 : 2;
    } catch (const tclae::Error& e) {
        std::cerr << "error [" << tclae::to_string(e.kind()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
