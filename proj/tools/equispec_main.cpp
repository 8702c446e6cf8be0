#include <CLI11.hpp>
#include <iostream>

#include "equispec/config.hpp"

namespace {

int run(equispec::ExperimentKind kind, const std::string& config_path, const std::string& out,
        long long seed, bool has_seed, bool verbose) {
    using namespace equispec;
    try {
        ExperimentConfig cfg = parse_config_file(config_path);
        if (cfg.kind != kind) {
            // Subcommand wins only when the config left the kind implicit; an
            // explicit mismatch is a configuration error.
            fail(ErrorCategory::config_invalid,
                 std::string("config experiment.kind '") + experiment_kind_name(cfg.kind) +
                     "' does not match subcommand '" + experiment_kind_name(kind) + "'");
        }
        if (!out.empty()) cfg.output_dir = out;
        if (has_seed) cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.verbose = verbose;
        return run_experiment(cfg);
    } catch (const equispec::Error& e) {
        std::cerr << "{\"error\":\"" << category_name(e.category()) << "\",\"message\":\""
                  << e.message() << "\"}" << std::endl;
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what() << "\"}" << std::endl;
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neumann spectra, isotypic classification and shape derivatives on "
                 "group-invariant planar domains"};
    app.require_subcommand(1);

    std::string config_path, out;
    long long seed = 0;
    bool verbose = false;

    struct Sub {
        const char* name;
        equispec::ExperimentKind kind;
        const char* help;
    };
    const Sub subs[] = {
        {"spectrum", equispec::ExperimentKind::spectrum, "solve the Neumann eigenproblem"},
        {"classify", equispec::ExperimentKind::classify,
         "cluster the spectrum and classify isotypic components"},
        {"derivative", equispec::ExperimentKind::derivative,
         "first/second Hadamard derivatives of an eigenvalue cluster"},
        {"split", equispec::ExperimentKind::split,
         "search for a symmetry-preserving splitting perturbation"},
        {"sweep", equispec::ExperimentKind::sweep,
         "random equivariant perturbations and G-simplicity statistics"},
        {"oracle-check", equispec::ExperimentKind::oracle_check,
         "closed-form disk/rectangle spectra (optionally compared to FEM)"},
    };

    std::map<std::string, equispec::ExperimentKind> chosen;
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "experiment config file (JSON)")->required();
        sub->add_option("--out", out, "output directory (overrides config)");
        sub->add_option("--seed", seed, "seed override");
        sub->add_flag("--verbose", verbose, "chatty progress output");
        chosen[s.name] = s.kind;
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, kind] : chosen) {
        CLI::App* sub = app.get_subcommand(name);
        if (sub->parsed())
            return run(kind, config_path, out, seed, sub->count("--seed") > 0, verbose);
    }
    return 1;
}
