#include "aoheom/run.hpp"

#include <chrono>
#include <fstream>

#include "aoheom/checkpoint.hpp"
#include "aoheom/errors.hpp"
#include "json.hpp"

namespace aoheom {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot write '" + path.string() + "'");
    return os;
}

std::array<OperatorMatrix, 3> dipoles(const BasisSet& basis, const RunConfig& config) {
    return {dipole_operator_matrix(basis, Axis::x, config.dipole_radial_mode, config.mu0),
            dipole_operator_matrix(basis, Axis::y, config.dipole_radial_mode, config.mu0),
            dipole_operator_matrix(basis, Axis::z, config.dipole_radial_mode, config.mu0)};
}

const OperatorMatrix& dipole(const std::array<OperatorMatrix, 3>& mu, Axis a) {
    return mu[static_cast<int>(a)];
}

json config_json(const RunConfig& c) {
    json j;
    j["n_max"] = c.n_max;
    j["beta"] = c.beta;
    j["eta"] = c.eta;
    j["gamma"] = c.gamma;
    j["pade_K"] = c.pade_K;
    j["depth"] = c.depth;
    j["truncation"] = to_string(c.truncation);
    j["dt"] = c.dt;
    j["n_steps"] = c.n_steps;
    j["terminator"] = to_string(c.terminator);
    j["dipole_radial_mode"] = to_string(c.dipole_radial_mode);
    j["mu0"] = c.mu0;
    j["apodization_rate"] = c.effective_apodization_rate();
    j["padding"] = c.padding;
    std::vector<std::string> comps;
    for (const auto& comp : c.components) comps.push_back(comp.name());
    j["components"] = comps;
    j["workers"] = c.workers;
    j["equilibration_tolerance"] = c.equilibration_tolerance;
    j["max_equilibration_steps"] = c.max_equilibration_steps;
    return j;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

const ComponentResult& AbsorptionResult::component(Component c) const {
    for (const auto& r : components) {
        if (r.component == c) return r;
    }
    throw InvalidArgument("component " + c.name() + " was not computed");
}

namespace {

AbsorptionResult absorb(const RunConfig& config, const EquilibrationResult* given) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const BasisSet basis = enumerate_basis(config.n_max);
    const ModelContext model =
        make_model(basis, config.bath(), config.pade_K, config.depth, config.truncation);
    const auto mu = dipoles(basis, config);
    const PropagatorConfig prop = config.propagator();

    AbsorptionResult result;
    result.config = config;
    result.dimension = basis.dimension();
    result.ado_count = model.space->size();
    if (given) {
        if (given->state.ados.size() != model.space->size() || given->state.dimension() != basis.dimension()) {
            throw InvalidArgument("equilibrium state does not match the configured model");
        }
        result.equilibrium = *given;
    } else {
        result.equilibrium = equilibrate(boltzmann_initial(basis, config.beta, model.space), model, prop);
    }
    result.equilibrium_diagnostics = diagnostics(result.equilibrium.state);

    const double apod = config.effective_apodization_rate();
    for (const auto& comp : config.components) {
        ComponentResult r;
        r.component = comp;
        r.response = compute_response(result.equilibrium.state, model, dipole(mu, comp.in),
                                      dipole(mu, comp.out), prop, comp);
        r.spectrum = spectrum_from_response(r.response, apod, config.padding);
        r.sticks = golden_rule_spectrum(basis, config.beta, dipole(mu, comp.out), dipole(mu, comp.in));
        result.components.push_back(std::move(r));
    }
    result.wall_seconds = seconds_since(start);
    return result;
}

}  // namespace

AbsorptionResult compute_absorption(const RunConfig& config) { return absorb(config, nullptr); }

AbsorptionResult compute_absorption(const RunConfig& config, const EquilibrationResult& equilibrium) {
    return absorb(config, &equilibrium);
}

void write_absorption(const AbsorptionResult& result, const fs::path& dir) {
    fs::create_directories(dir);
    json meta;
    meta["config"] = config_json(result.config);
    meta["dimension"] = result.dimension;
    meta["ado_count"] = result.ado_count;
    meta["equilibration"] = {
        {"residual", result.equilibrium.residual},
        {"steps", result.equilibrium.steps},
        {"trace_drift", std::abs(result.equilibrium_diagnostics.trace - Complex{1.0, 0.0})},
        {"hermiticity_defect", result.equilibrium_diagnostics.max_hermiticity_defect},
        {"populations", result.equilibrium_diagnostics.populations}};
    json comps = json::array();
    for (const auto& r : result.components) {
        const std::string name = r.component.name();
        {
            auto os = open_output(dir / ("spectrum_" + name + ".csv"));
            write_spectrum_csv(os, r.spectrum);
        }
        {
            auto os = open_output(dir / ("response_" + name + ".csv"));
            write_response_csv(os, r.response);
        }
        {
            auto os = open_output(dir / ("golden_rule_" + name + ".csv"));
            write_sticks_csv(os, r.sticks);
        }
        comps.push_back({{"component", name},
                         {"response_trace_drift", r.response.max_trace_drift},
                         {"bin_width", r.spectrum.meta.bin_width},
                         {"raw_bin_width", r.spectrum.meta.raw_bin_width},
                         {"apodization_rate", r.spectrum.meta.apodization_rate},
                         {"padding", r.spectrum.meta.padding},
                         {"partition_function", r.sticks.partition}});
    }
    meta["components"] = comps;
    meta["wall_seconds"] = result.wall_seconds;
    auto os = open_output(dir / "metadata.json");
    os << meta.dump(2) << '\n';
}

AbsorptionResult run_absorption(const RunConfig& config) {
    auto result = compute_absorption(config);
    write_absorption(result, config.output_dir);
    return result;
}

TruncationStudy summarize_truncation(const std::vector<AbsorptionResult>& runs) {
    TruncationStudy study;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& run = runs[i];
        if (i > 0) {
            if (run.config.n_max <= runs[i - 1].config.n_max) {
                throw InvalidArgument("truncation runs must be ordered by increasing n_max");
            }
            if (run.config.components != runs[0].config.components) {
                throw InvalidArgument("truncation runs must request the same components");
            }
        }
        study.n_max_list.push_back(run.config.n_max);
        if (i == 0) study.components = run.config.components;
        std::vector<Spectrum> normalized_run;
        for (const auto& r : run.components) normalized_run.push_back(normalized(r.spectrum));
        study.normalized.push_back(std::move(normalized_run));
    }
    for (std::size_t i = 1; i < runs.size(); ++i) {
        for (std::size_t c = 0; c < study.normalized[i].size(); ++c) {
            study.differences.push_back({study.n_max_list[i - 1], study.n_max_list[i],
                                         runs[i].components[c].component,
                                         linf_difference(study.normalized[i - 1][c], study.normalized[i][c])});
        }
    }
    return study;
}

void write_truncation(const TruncationStudy& study, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < study.n_max_list.size(); ++i) {
        for (std::size_t c = 0; c < study.components.size(); ++c) {
            auto os = open_output(dir / ("truncation_nmax" + std::to_string(study.n_max_list[i]) + "_" +
                                         study.components[c].name() + ".csv"));
            write_spectrum_csv(os, study.normalized[i][c]);
        }
    }
    auto report = open_output(dir / "truncation_report.csv");
    report.precision(17);
    report << "n_max_a,n_max_b,component,linf\n";
    for (const auto& d : study.differences) {
        report << d.n_max_a << ',' << d.n_max_b << ',' << d.component.name() << ',' << d.linf << '\n';
    }
}

TruncationStudy run_truncation_study(const RunConfig& config, const std::vector<int>& n_max_list) {
    if (n_max_list.empty()) throw InvalidArgument("truncation study needs at least one n_max value");
    for (int n : n_max_list) {
        // n_max = 1 has no transitions, so there is nothing to normalise
        if (n < 2) throw InvalidArgument("truncation study requires n_max >= 2");
    }
    std::vector<AbsorptionResult> runs;
    for (int n : n_max_list) {
        RunConfig c = config;
        c.n_max = n;
        runs.push_back(compute_absorption(c));
    }
    auto study = summarize_truncation(runs);
    write_truncation(study, config.output_dir);
    return study;
}

std::vector<StickSpectrum> run_golden_rule(const RunConfig& config) {
    config.validate();
    const BasisSet basis = enumerate_basis(config.n_max);
    const auto mu = dipoles(basis, config);
    fs::create_directories(config.output_dir);
    std::vector<StickSpectrum> out;
    for (const auto& comp : config.components) {
        out.push_back(golden_rule_spectrum(basis, config.beta, dipole(mu, comp.out), dipole(mu, comp.in)));
        auto os = open_output(fs::path(config.output_dir) / ("golden_rule_" + comp.name() + ".csv"));
        write_sticks_csv(os, out.back());
    }
    return out;
}

EquilibrationResult run_equilibrate(const RunConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const BasisSet basis = enumerate_basis(config.n_max);
    const ModelContext model =
        make_model(basis, config.bath(), config.pade_K, config.depth, config.truncation);
    auto result =
        equilibrate(boltzmann_initial(basis, config.beta, model.space), model, config.propagator());
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    write_checkpoint((dir / "equilibrium.ckpt").string(), CheckpointHeader::from_model(model, 0.0),
                     result.state);
    const auto diag = diagnostics(result.state);
    json meta;
    meta["config"] = config_json(config);
    meta["dimension"] = basis.dimension();
    meta["ado_count"] = model.space->size();
    meta["residual"] = result.residual;
    meta["steps"] = result.steps;
    meta["trace_drift"] = std::abs(diag.trace - Complex{1.0, 0.0});
    meta["hermiticity_defect"] = diag.max_hermiticity_defect;
    meta["populations"] = diag.populations;
    meta["wall_seconds"] = seconds_since(start);
    auto os = open_output(dir / "equilibrium.json");
    os << meta.dump(2) << '\n';
    return result;
}

void dump_matrices(const RunConfig& config) {
    config.validate();
    const BasisSet basis = enumerate_basis(config.n_max);
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    {
        auto os = open_output(dir / "basis.csv");
        os << "index,n,l,m,energy\n";
        os.precision(17);
        for (std::size_t i = 0; i < basis.dimension(); ++i) {
            const auto& q = basis[i];
            os << i << ',' << q.n << ',' << q.l << ',' << q.m << ',' << eigenenergy(q.n) << '\n';
        }
    }
    std::vector<OperatorMatrix> ops{hamiltonian_matrix(basis)};
    for (Axis a : kAxes) ops.push_back(position_operator_matrix(basis, a, RadialMode::linear));
    for (auto& m : dipoles(basis, config)) ops.push_back(std::move(m));
    for (const auto& op : ops) {
        auto os = open_output(dir / (to_string(op.label) + ".csv"));
        write_matrix_csv(os, basis, op);
    }
}

void write_error_report(const fs::path& dir, const std::string& command, const std::exception& error) {
    try {
        fs::create_directories(dir);
        json j;
        j["command"] = command;
        j["error"] = error.what();
        if (const auto* c = dynamic_cast<const ConvergenceError*>(&error)) j["residual"] = c->residual();
        if (const auto* d = dynamic_cast<const DivergenceError*>(&error)) {
            j["step"] = d->step();
            j["ado"] = d->ado();
        }
        if (const auto* p = dynamic_cast<const ParseError*>(&error)) j["line"] = p->line();
        std::ofstream os(dir / "error.json");
        os << j.dump(2) << '\n';
    } catch (...) {
    }
}

}  // namespace aoheom
