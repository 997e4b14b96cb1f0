// omqfi command-line interface: sweeps, the reference table, oracle checks,
// and mechanics solution dumps.

#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "omqfi/cli.hpp"
#include "omqfi/errors.hpp"

namespace {

using namespace omqfi;

int run_table1(bool sensitivity, double mu2_override, bool has_override) {
    cli::Table1Options opt;
    opt.sensitivity = sensitivity;
    if (has_override) opt.mu2_override = mu2_override;
    const cli::Table1Report rep = cli::table1(opt);

    std::printf("%-14s %14s %14s %10s", "quantity", "computed", "reference", "rel.dev");
    if (sensitivity) std::printf("  %s", "sensitivity");
    std::printf("\n");
    for (const auto& row : rep.rows) {
        std::printf("%-14s %14.6g %14.6g %10.2e", row.label.c_str(), row.computed,
                    row.reference, row.rel_deviation);
        if (row.sensitivity) {
            std::printf("  %.3g (%s)", *row.sensitivity, row.sensitivity_label.c_str());
        }
        std::printf("\n");
    }
    std::printf("max relative deviation: %.2e -> %s\n", rep.max_rel_deviation,
                rep.pass ? "PASS" : "FAIL");
    return rep.pass ? cli::exit_ok : cli::exit_deviation;
}

int run_oracle_check(const std::string& preset, double dt_override, bool has_dt) {
    const cli::OracleCheckReport rep =
        cli::oracle_check(preset, has_dt ? std::optional<double>(dt_override)
                                         : std::nullopt);
    std::printf("label,analytic,oracle,rel_error\n");
    for (const auto& row : rep.rows) {
        std::printf("%s,%.10g,%.10g,%.3e\n", row.label.c_str(), row.analytic, row.oracle,
                    row.rel_error);
    }
    std::printf("max relative error: %.3e -> %s\n", rep.max_rel_error,
                rep.pass ? "PASS" : "FAIL");
    return rep.pass ? cli::exit_ok : cli::exit_deviation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Fisher information bounds for time-dependent nonlinear "
                 "optomechanics"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a QFI sweep from a config file");
    sweep_cmd->add_option("config", config_path, "config file")->required();

    bool sensitivity = false;
    double mu2_override = 0.0;
    auto* table_cmd = app.add_subcommand("table1", "reproduce the reference QFI table");
    table_cmd->add_flag("--sensitivity", sensitivity,
                        "append single-shot sensitivities 1/sqrt(QFI)");
    auto* mu2_opt = table_cmd->add_option("--mu2", mu2_override,
                                          "override the coherent-state |mu|^2");

    std::string preset = "default";
    double dt_override = 0.0;
    auto* oracle_cmd =
        app.add_subcommand("oracle-check", "compare analytic QFI against the "
                                           "truncated-Fock-space oracle");
    oracle_cmd->add_option("--preset", preset, "instance preset (default|quick)");
    auto* dt_opt = oracle_cmd->add_option("--dt", dt_override,
                                          "override the oracle's initial step");

    auto* mech_cmd = app.add_subcommand("mechanics", "mechanical-subsystem tools");
    mech_cmd->require_subcommand(1);
    std::string mech_config;
    auto* dump_cmd = mech_cmd->add_subcommand("dump", "solve and write the CSV dump");
    dump_cmd->add_option("config", mech_config, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep_cmd) {
            const cli::Config cfg = cli::load_config(config_path);
            if (!cfg.sweep) {
                std::cerr << "config has no [sweep] section\n";
                return cli::exit_validation;
            }
            const auto rows = cli::run_sweep(*cfg.sweep);
            std::printf("wrote %zu rows to %s\n", rows.size(),
                        cfg.sweep->output_path.c_str());
            return cli::exit_ok;
        }
        if (*table_cmd) {
            return run_table1(sensitivity, mu2_override, mu2_opt->count() > 0);
        }
        if (*oracle_cmd) {
            return run_oracle_check(preset, dt_override, dt_opt->count() > 0);
        }
        if (*dump_cmd) {
            const cli::Config cfg = cli::load_config(mech_config);
            if (!cfg.mechanics) {
                std::cerr << "config has no [mechanics] section\n";
                return cli::exit_validation;
            }
            cli::mechanics_dump(*cfg.mechanics);
            std::printf("wrote %s\n", cfg.mechanics->output_path.c_str());
            return cli::exit_ok;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return cli::exit_validation;
    } catch (const IntegratorError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return cli::exit_numerical;
    } catch (const TruncationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return cli::exit_numerical;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return cli::exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_numerical;
    }
    return cli::exit_ok;
}
