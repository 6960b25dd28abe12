// aoheom: absorption spectra of a hydrogenic system in three Drude baths.
//
//   aoheom absorb --config run.cfg --out results --workers 4
//
// Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "aoheom/config.hpp"
#include "aoheom/errors.hpp"
#include "aoheom/run.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config_path;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
    std::vector<int> n_max_list;
};

aoheom::RunConfig resolve(const Options& o) {
    auto config = aoheom::load_config(o.config_path);
    if (o.workers) config.workers = *o.workers;
    if (o.out) config.output_dir = *o.out;
    config.validate();
    return config;
}

void report_absorption(const aoheom::AbsorptionResult& r) {
    std::cout << "states " << r.dimension << ", ADOs " << r.ado_count << ", equilibrated in "
              << r.equilibrium.steps << " steps (residual " << r.equilibrium.residual << ")\n";
    for (const auto& c : r.components) {
        std::cout << "I_" << c.component.name() << ": " << c.spectrum.omega.size() << " bins of width "
                  << c.spectrum.meta.bin_width << '\n';
    }
    std::cout << "wall time " << r.wall_seconds << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical equations of motion absorption spectra for a hydrogenic system"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--workers", opt.workers, "worker threads for the hierarchy right-hand side")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", opt.out, "output directory (overrides output_dir)");
    };

    auto* absorb = app.add_subcommand("absorb", "equilibrate, propagate the dipole response and transform");
    auto* golden = app.add_subcommand("golden-rule", "golden-rule stick spectrum of the isolated system");
    auto* equil = app.add_subcommand("equilibrate", "equilibrate the hierarchy and write a checkpoint");
    auto* trunc = app.add_subcommand("truncation-study", "absorption spectra for a list of n_max");
    auto* dump = app.add_subcommand("dump-matrices", "write H_S, V and dipole matrices as CSV");
    for (auto* sub : {absorb, golden, equil, trunc, dump}) add_common(sub);
    trunc->add_option("--n-max-list", opt.n_max_list, "ascending n_max values (default from config)")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::string out_dir = opt.out.value_or("aoheom_out");
    try {
        const auto config = resolve(opt);
        out_dir = config.output_dir;
        if (absorb->parsed()) {
            report_absorption(aoheom::run_absorption(config));
        } else if (golden->parsed()) {
            for (const auto& s : aoheom::run_golden_rule(config)) {
                std::cout << s.lines.size() << " lines, Z = " << s.partition << '\n';
            }
        } else if (equil->parsed()) {
            const auto r = aoheom::run_equilibrate(config);
            std::cout << "equilibrated in " << r.steps << " steps (residual " << r.residual << ")\n";
        } else if (trunc->parsed()) {
            const auto list = opt.n_max_list.empty() ? config.n_max_list : opt.n_max_list;
            aoheom::RunConfig check = config;
            check.n_max_list = list;
            check.validate();
            const auto study = aoheom::run_truncation_study(config, list);
            for (const auto& d : study.differences) {
                std::cout << "I_" << d.component.name() << " n_max " << d.n_max_a << " vs " << d.n_max_b
                          << ": " << d.linf << '\n';
            }
        } else if (dump->parsed()) {
            aoheom::dump_matrices(config);
        }
        std::cout << "wrote " << config.output_dir << '\n';
        return 0;
    } catch (const aoheom::InvalidArgument& e) {
        std::cerr << "aoheom " << command << ": " << e.what() << '\n';
        aoheom::write_error_report(out_dir, command, e);
        return kExitInvalid;
    } catch (const aoheom::NumericalFailure& e) {
        std::cerr << "aoheom " << command << ": " << e.what() << '\n';
        aoheom::write_error_report(out_dir, command, e);
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "aoheom " << command << ": " << e.what() << '\n';
        aoheom::write_error_report(out_dir, command, e);
        return 1;
    }
}
