// conespec command-line front end.
//
//   conespec run CONFIG [--cmd CMD] [--out-dir DIR] [--threads N] [--only KEY]...
//   conespec verify [--only KEY]... [--threads N] [--out-dir DIR]
//
// Exit status: 0 success, 1 input error, 2 verification failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conespec/conespec.hpp"

#ifndef CONESPEC_DATA_DIR
#define CONESPEC_DATA_DIR ""
#endif

namespace {

std::string default_data_dir() {
    if (const char* env = std::getenv("CONESPEC_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return CONESPEC_DATA_DIR;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conespec: spectral laboratory for glued cone manifolds"};
    app.require_subcommand(1);

    std::string config_path, cmd, out_dir, data_dir = default_data_dir();
    std::vector<std::string> only;
    unsigned threads = 0;
    bool tamper = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "Directory for CSV/JSON artifacts");
        sub->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
        sub->add_option("--only", only, "Verification criteria to run (keys or numbers)");
        sub->add_option("--data-dir", data_dir, "Directory of topology decomposition files")->capture_default_str();
        sub->add_flag("--fault-inject-bessel", tamper, "Perturb the Bessel evaluator (checks that verify catches it)");
    };

    auto* run = app.add_subcommand("run", "Execute the pipeline described by a run config");
    run->add_option("config", config_path, "Run-config file")->required();
    run->add_option("--cmd", cmd, "Command overriding the config's cmd")
        ->check(CLI::IsMember(conespec::run::command_names()));
    add_common(run);

    auto* verify = app.add_subcommand("verify", "Run the built-in acceptance suite");
    add_common(verify);

    CLI11_PARSE(app, argc, argv);

    conespec::run::ExecOptions ex;
    ex.threads = threads;
    ex.only = only;
    ex.topology_dir = data_dir;
    if (tamper) ex.bessel = &conespec::verify::tampered_bessel();
    if (!out_dir.empty()) ex.out_dir = out_dir;

    try {
        conespec::run::RunConfig rc;
        if (run->parsed()) {
            rc = conespec::run::load_run_config(config_path);
            if (!cmd.empty()) ex.cmd = cmd;
        } else {
            rc.stem = "verify";
            ex.cmd = "verify";
            if (out_dir.empty()) {
                // No artifact requested: print the report only.
                conespec::verify::Options vo;
                vo.only = only;
                vo.threads = threads;
                vo.seed = conespec::verify::seed_from_env();
                vo.topology_dir = data_dir;
                vo.bessel = ex.bessel;
                const auto rep = conespec::verify::run(vo, [](const conespec::verify::CriterionResult& r) {
                    std::cout << conespec::verify::format_line(r) << std::endl;
                });
                return rep.all_passed() ? 0 : 2;
            }
        }
        const auto outcome = conespec::run::execute(rc, ex, std::cout);
        for (const auto& a : outcome.artifacts) std::cerr << "wrote " << a << '\n';
        return outcome.exit_code;
    } catch (const conespec::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
