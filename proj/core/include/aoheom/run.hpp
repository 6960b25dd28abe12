#pragma once

// Run orchestration behind the command line tool: equilibrate, perturb,
// propagate, transform, and write CSV/JSON results.

#include <filesystem>
#include <vector>

#include "aoheom/config.hpp"
#include "aoheom/propagator.hpp"
#include "aoheom/spectroscopy.hpp"

namespace aoheom {

struct ComponentResult {
    Component component;
    ResponseTrace response;
    Spectrum spectrum;
    StickSpectrum sticks;
};

struct AbsorptionResult {
    RunConfig config;
    std::size_t dimension = 0;
    std::size_t ado_count = 0;
    EquilibrationResult equilibrium;
    Diagnostics equilibrium_diagnostics;
    std::vector<ComponentResult> components;
    double wall_seconds = 0.0;

    const ComponentResult& component(Component c) const;
};

// Everything in memory; no files are written.
AbsorptionResult compute_absorption(const RunConfig& config);
// Same, starting from an equilibrium computed earlier for the same model. The
// hierarchy fixed point does not depend on dt, so this is how dt studies
// avoid a second equilibration.
AbsorptionResult compute_absorption(const RunConfig& config, const EquilibrationResult& equilibrium);

// spectrum_<c>.csv, response_<c>.csv, golden_rule_<c>.csv per component and metadata.json.
// Only metadata.json carries timing, so the CSV files are reproducible bit for bit.
void write_absorption(const AbsorptionResult& result, const std::filesystem::path& dir);

// compute_absorption + write_absorption into config.output_dir.
AbsorptionResult run_absorption(const RunConfig& config);

struct TruncationDifference {
    int n_max_a = 0;
    int n_max_b = 0;
    Component component;
    double linf = 0.0;
};

struct TruncationStudy {
    std::vector<int> n_max_list;
    std::vector<Component> components;
    std::vector<std::vector<Spectrum>> normalized;  // [n_max][component], max = 1
    std::vector<TruncationDifference> differences;  // consecutive pairs, per component
};

// Normalises each run to its maximum and compares consecutive members; the
// runs must share the time grid and components and be ordered by n_max.
TruncationStudy summarize_truncation(const std::vector<AbsorptionResult>& runs);

// One absorption run per n_max, written with write_truncation into config.output_dir.
TruncationStudy run_truncation_study(const RunConfig& config, const std::vector<int>& n_max_list);

// truncation_nmax<n>_<c>.csv per member and truncation_report.csv.
void write_truncation(const TruncationStudy& study, const std::filesystem::path& dir);

// Golden-rule sticks only: golden_rule_<c>.csv.
std::vector<StickSpectrum> run_golden_rule(const RunConfig& config);

// Writes equilibrium.ckpt and equilibrium.json.
EquilibrationResult run_equilibrate(const RunConfig& config);

// H_S.csv, V_x.csv ... mu_z.csv and basis.csv.
void dump_matrices(const RunConfig& config);

// Writes error.json describing a failed run (best effort, never throws).
void write_error_report(const std::filesystem::path& dir, const std::string& command,
                        const std::exception& error);

}  // namespace aoheom
