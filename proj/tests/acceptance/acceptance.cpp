// Acceptance run: one PASS/FAIL line per criterion.
//
//   aoheom_acceptance [--only 1,7,14] [--nightly] [--known-failures 2] [--out dir]
//
// Exit status is 0 when the set of failing criteria equals --known-failures
// (empty by default). Known failures are still printed as FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "CLI11.hpp"
#include "aoheom/basis.hpp"
#include "aoheom/bath.hpp"
#include "aoheom/config.hpp"
#include "aoheom/errors.hpp"
#include "aoheom/propagator.hpp"
#include "aoheom/run.hpp"
#include "aoheom/spectroscopy.hpp"
#include "oracles.hpp"

using namespace aoheom;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void progress(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig isotropic_config(int n_max, double beta, double eta) {
    RunConfig c;
    c.n_max = n_max;
    c.beta = beta;
    c.eta.fill(eta);
    c.gamma.fill(1.0);
    c.components = {Component::parse("zz"), Component::parse("xx")};
    return c;
}

// Runs are expensive, so they are computed once and shared between criteria.
class Runs {
public:
    explicit Runs(fs::path out) : out_(std::move(out)) {}

    const AbsorptionResult& get(const std::string& key, const RunConfig& config,
                                const EquilibrationResult* equilibrium = nullptr) {
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        progress("absorption run '" + key + "' (n_max " + std::to_string(config.n_max) + ", workers " +
                 std::to_string(config.workers) + ")");
        auto r = equilibrium ? compute_absorption(config, *equilibrium) : compute_absorption(config);
        progress(fmt("'%s': %zu equilibration steps, residual %.3g, %.1f s", key.c_str(), r.equilibrium.steps,
                     r.equilibrium.residual, r.wall_seconds));
        write_absorption(r, out_ / key);
        return cache_.emplace(key, std::move(r)).first->second;
    }

    const std::map<std::string, AbsorptionResult>& all() const { return cache_; }
    const fs::path& out() const { return out_; }

private:
    fs::path out_;
    std::map<std::string, AbsorptionResult> cache_;
};

// The weak-coupling setup shared by several criteria.
RunConfig weak_config(unsigned workers) {
    auto c = isotropic_config(3, 5.0, 1e-4);
    c.workers = workers;
    return c;
}

const AbsorptionResult& weak_run(Runs& runs) { return runs.get("weak", weak_config(1)); }

// ---------------------------------------------------------------------------

Outcome c1_energies() {
    double worst = 0.0;
    const auto basis = enumerate_basis(5);
    const auto H = hamiltonian_matrix(basis);
    for (int n = 1; n <= 5; ++n) worst = std::max(worst, std::abs(eigenenergy(n) + 1.0 / (2.0 * n * n)));
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const int n = basis[i].n;
        worst = std::max(worst, std::abs(H(i, i) + 1.0 / (2.0 * n * n)));
    }
    return {worst < 1e-12, fmt("max |E_n + 1/(2n^2)| = %.2e", worst)};
}

Outcome c2_table() {
    struct Entry {
        int n, np;
        double printed;
    };
    const Entry table[] = {{1, 2, 0.375},   {1, 3, 0.44444}, {1, 4, 0.46875}, {1, 5, 0.48},    {2, 3, 0.06944},
                           {2, 4, 0.09375}, {2, 5, 0.105},   {3, 4, 0.02430}, {3, 5, 0.03555}, {4, 5, 0.01125}};
    std::string bad;
    double worst = 0.0;
    for (const auto& e : table) {
        const double d = std::abs(rydberg_frequency(e.n, e.np) - e.printed);
        worst = std::max(worst, d);
        if (d > 5e-6) bad += fmt(" (%d,%d) off by %.2e;", e.n, e.np, d);
    }
    if (bad.empty()) return {true, fmt("all ten entries within 5e-6 (max %.2e)", worst)};
    return {false, "outside 5e-6:" + bad};
}

Outcome c3_golden_rule() {
    const auto basis = enumerate_basis(5);
    std::set<std::pair<int, int>> table;
    for (int n = 1; n <= 4; ++n)
        for (int np = n + 1; np <= 5; ++np) table.insert({n, np});
    double freq_err = 0.0, weight_err = 0.0;
    std::size_t lines = 0;
    bool ok = true;
    for (Axis a : kAxes) {
        const auto mu = dipole_operator_matrix(basis, a, RadialMode::unit, 1.0);
        for (double beta : {1.0, 5.0}) {
            const auto sticks = golden_rule_spectrum(basis, beta, mu, mu);
            const auto ref = oracle::golden_rule_bruteforce(basis, beta, mu.entries, mu.entries);
            std::size_t nonzero = 0;
            for (const auto& [key, w] : ref) nonzero += std::abs(w) >= 1e-14;
            ok = ok && sticks.lines.size() == nonzero;
            for (const auto& line : sticks.lines) {
                ok = ok && table.count({line.n, line.n_prime}) == 1;
                const double exact = 0.5 * (1.0 / (line.n * line.n) - 1.0 / (line.n_prime * line.n_prime));
                freq_err = std::max(freq_err, std::abs(line.omega - exact));
                weight_err = std::max(weight_err, std::abs(line.weight - ref.at({line.n, line.n_prime})));
                ++lines;
            }
        }
    }
    ok = ok && freq_err < 1e-12 && weight_err < 1e-12;
    return {ok, fmt("%zu sticks, frequency error %.2e, weight error vs brute force %.2e", lines, freq_err,
                    weight_err)};
}

Outcome c4_dipole() {
    const auto basis = enumerate_basis(5);
    const auto z = position_operator_matrix(basis, Axis::z, RadialMode::linear);
    const double value = z(*basis.index_of({1, 0, 0}), *basis.index_of({2, 1, 0}));
    const double closed = 128.0 * std::sqrt(6.0) / (243.0 * std::sqrt(3.0));
    double forbidden = 0.0;
    for (Axis a : kAxes) {
        const auto V = position_operator_matrix(basis, a, RadialMode::linear);
        for (std::size_t i = 0; i < basis.dimension(); ++i) {
            for (std::size_t j = 0; j < basis.dimension(); ++j) {
                const auto& p = basis[i];
                const auto& q = basis[j];
                bool allowed = std::abs(p.l - q.l) == 1;
                if (a == Axis::z) allowed = allowed && p.m == q.m;
                else allowed = allowed && std::abs(std::abs(p.m) - std::abs(q.m)) == 1;
                if (!allowed) forbidden = std::max(forbidden, std::abs(V(i, j)));
            }
        }
    }
    const bool ok = std::abs(value - 0.74494) < 1e-5 && std::abs(value - closed) < 1e-5 && forbidden < 1e-10;
    return {ok, fmt("<1s|V_z|2p_z> = %.8f (closed form %.8f), max forbidden entry %.2e", value, closed, forbidden)};
}

Outcome c5_dense_oracle() {
    auto basis = BasisSet::from_states({{1, 0, 0}, {2, 1, 0}});
    std::array<OperatorMatrix, 3> V{position_operator_matrix(basis, Axis::x),
                                    position_operator_matrix(basis, Axis::y),
                                    position_operator_matrix(basis, Axis::z)};
    BathSpec bath;
    bath.axes = {DrudeBath{0.0, 1.0}, DrudeBath{0.0, 1.0}, DrudeBath{0.05, 1.0}};
    bath.beta = 1.0;
    const auto model = make_model(basis, hamiltonian_matrix(basis), V, bath, {1, 1, 1}, 2);
    const auto dense = oracle::assemble(model, true);

    auto state = boltzmann_initial(basis, 1.0, model.space);
    state.reduced()(0, 1) = state.reduced()(1, 0) = 0.2;
    const Eigen::VectorXcd expected = (dense.L * 10.0).exp() * dense.pack(state);
    Rk4Integrator rk4(model, {});
    for (int s = 0; s < 100; ++s) rk4.step(state, 0.1, s);
    const double err = (dense.pack(state) - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
    return {err < 1e-6, fmt("relative L-inf error at t = 10: %.2e (%zu ADOs)", err, model.space->size())};
}

Outcome c6_conservation() {
    const auto basis = enumerate_basis(3);
    const auto model = make_model(basis, BathSpec::isotropic(0.01, 1.0, 1.0), {1, 1, 1}, 2);
    auto state = boltzmann_initial(basis, 1.0, model.space);
    Rk4Integrator rk4(model, {});
    double trace = 0.0, herm = 0.0;
    for (std::size_t s = 0; s < 3000; ++s) {
        rk4.step(state, 0.1, s);
        const auto d = diagnostics(state);
        trace = std::max(trace, std::abs(d.trace - 1.0));
        herm = std::max(herm, d.max_hermiticity_defect);
    }
    return {trace < 1e-8 && herm < 1e-10,
            fmt("3000 steps: max |Tr rho_0 - 1| = %.2e, max Hermiticity defect = %.2e", trace, herm)};
}

Outcome c7_peaks(Runs& runs) {
    const auto& r = weak_run(runs);
    const auto& s = r.component(Component::parse("zz")).spectrum;
    std::string detail;
    bool ok = true;
    for (double target : {0.375, 0.44444}) {
        const auto p = peak_near(s, target, 0.02);
        const double off = std::abs(p.omega - target);
        ok = ok && off < s.meta.bin_width;
        detail += fmt("peak %.5f (target %.5f, %.2f bins); ", p.omega, target, off / s.meta.bin_width);
    }
    return {ok, detail + fmt("bin %.5f", s.meta.bin_width)};
}

Outcome c8_boltzmann(Runs& runs) {
    const auto& r = weak_run(runs);
    const auto basis = enumerate_basis(r.config.n_max);
    double z = 0.0;
    for (const auto& q : basis.states()) z += std::exp(-r.config.beta * eigenenergy(q.n));
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const double p = std::exp(-r.config.beta * eigenenergy(basis[i].n)) / z;
        worst = std::max(worst, std::abs(r.equilibrium_diagnostics.populations[i] / p - 1.0));
    }
    return {worst < 0.01, fmt("max relative population deviation %.3e (equilibrium residual %.2e after %zu steps)",
                              worst, r.equilibrium.residual, r.equilibrium.steps)};
}

RunConfig beta1_config(int n_max, double eta) { return isotropic_config(n_max, 1.0, eta); }

std::string eta_key(int n_max, double eta) { return fmt("beta1_nmax%d_eta%g", n_max, eta); }

Outcome c9_broadening(Runs& runs) {
    std::vector<double> widths;
    std::string detail = "HWHM:";
    for (double eta : {0.001, 0.005, 0.01}) {
        const auto& r = runs.get(eta_key(3, eta), beta1_config(3, eta));
        widths.push_back(half_width(r.component(Component::parse("zz")).spectrum, 0.375, 0.05));
        detail += fmt(" eta %g -> %.5f;", eta, widths.back());
    }
    const bool ok = widths[0] < widths[1] && widths[1] < widths[2];
    return {ok, detail};
}

Outcome c10_low_frequency(Runs& runs) {
    std::vector<double> ratio;
    std::string detail;
    for (double eta : {0.001, 0.01}) {
        const auto& r = runs.get(eta_key(4, eta), beta1_config(4, eta));
        const auto& s = r.component(Component::parse("zz")).spectrum;
        ratio.push_back(integrate(s, 0.0, 0.05) / integrate(s, 0.3, 0.5));
        detail += fmt("eta %g: low/high = %.4e; ", eta, ratio.back());
    }
    return {ratio[1] < ratio[0], detail};
}

Outcome c11_truncation(Runs& runs, bool nightly) {
    std::vector<int> list{2, 3, 4};
    if (nightly) list.push_back(5);
    std::vector<AbsorptionResult> members;
    std::string detail;
    for (int n : list) {
        // n = 5 is not RK4-stable at dt 0.1; halve dt and keep the time window
        auto c = beta1_config(n, 0.01);
        const auto model = make_model(enumerate_basis(n), c.bath(), c.pade_K, c.depth, c.truncation);
        while (rk4_stability_estimate(model, c.dt) > 2.8) {
            c.dt /= 2.0;
            c.n_steps *= 2;
        }
        std::string key = eta_key(n, 0.01);
        if (c.dt != RunConfig{}.dt) {
            key += fmt("_dt%g", c.dt);
            detail += fmt("n_max %d at dt %g; ", n, c.dt);
        }
        members.push_back(runs.get(key, c));
    }
    const auto study = summarize_truncation(members);
    write_truncation(study, runs.out() / "truncation");
    bool ok = true;
    for (const auto& comp : study.components) {
        double prev = std::numeric_limits<double>::infinity();
        detail += comp.name() + ":";
        for (const auto& d : study.differences) {
            if (!(d.component == comp)) continue;
            ok = ok && d.linf <= prev;
            prev = d.linf;
            detail += fmt(" %d->%d %.4e", d.n_max_a, d.n_max_b, d.linf);
        }
        detail += "; ";
    }
    if (!nightly) detail += "n_max 5 skipped (--nightly)";
    return {ok, detail};
}

Outcome c12_isotropy(Runs& runs) {
    weak_run(runs);
    double worst = 0.0;
    std::string which;
    std::size_t compared = 0;
    for (const auto& [key, r] : runs.all()) {
        const auto& comps = r.config.components;
        if (std::find(comps.begin(), comps.end(), Component::parse("xx")) == comps.end()) continue;
        ++compared;
        const auto& zz = r.component(Component::parse("zz")).spectrum;
        const auto& xx = r.component(Component::parse("xx")).spectrum;
        const double scale = *std::max_element(zz.intensity.begin(), zz.intensity.end(),
                                               [](double a, double b) { return std::abs(a) < std::abs(b); });
        const double d = linf_difference(xx, zz) / std::abs(scale);
        if (d >= worst) {
            worst = d;
            which = key;
        }
    }
    return {worst < 1e-6, fmt("max relative |I_xx - I_zz| = %.2e over %zu runs (worst: %s)", worst,
                              compared, which.c_str())};
}

Outcome c13_pade() {
    bool monotone = true;
    std::string detail;
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        const double exact = bose_exact(x);
        double prev = std::numeric_limits<double>::infinity();
        for (int K = 1; K <= 8; ++K) {
            const double err = std::abs(bose_approximant(pade_decomposition(K), x) - exact);
            // differences below a few ulps of the function are rounding, not convergence
            if (err > prev + 16.0 * std::numeric_limits<double>::epsilon() * exact) {
                monotone = false;
                detail += fmt("x=%g K=%d error rises %.2e -> %.2e; ", x, K, prev, err);
            }
            prev = err;
        }
    }
    const double rel = std::abs(bose_approximant(pade_decomposition(5), 1.0) / bose_exact(1.0) - 1.0);
    return {monotone && rel < 1e-8, detail + fmt("K=5 relative error at x=1: %.2e", rel)};
}

Outcome c14_determinism(Runs& runs) {
    weak_run(runs);
    runs.get("weak_w8", weak_config(8));
    std::string diff;
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(runs.out() / "weak")) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        const auto other = runs.out() / "weak_w8" / entry.path().filename();
        if (slurp(entry.path()) != slurp(other)) diff += " " + entry.path().filename().string();
    }
    if (diff.empty()) return {files > 0, fmt("%zu CSV files identical for 1 and 8 workers", files)};
    return {false, "differ:" + diff};
}

Outcome c15_dt(Runs& runs) {
    const auto& base = weak_run(runs);
    auto cfg = weak_config(1);
    cfg.dt = 0.05;
    cfg.n_steps = 6000;
    cfg.components = {Component::parse("zz")};
    const auto& half = runs.get("weak_dt_half", cfg, &base.equilibrium);
    const auto& a = base.component(Component::parse("zz")).spectrum;
    const auto& b = half.component(Component::parse("zz")).spectrum;
    bool ok = std::abs(a.meta.bin_width - b.meta.bin_width) < 1e-12 * a.meta.bin_width;
    std::string detail;
    for (double target : {0.375, 0.44444}) {
        const auto pa = peak_near(a, target, 0.02);
        const auto pb = peak_near(b, target, 0.02);
        const double shift = std::abs(pa.omega - pb.omega) / a.meta.bin_width;
        const double height = std::abs(pb.height / pa.height - 1.0);
        ok = ok && shift < 0.1 && height < 0.005;
        detail += fmt("%.5f: shift %.2e bins, height change %.2e; ", target, shift, height);
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    std::vector<int> known;
    bool nightly = std::getenv("AOHEOM_NIGHTLY") != nullptr;
    std::string out = (fs::temp_directory_path() / "aoheom_acceptance").string();
    app.add_option("--only", only, "run only these criteria")->delimiter(',');
    app.add_option("--known-failures", known, "criteria expected to fail")->delimiter(',');
    app.add_flag("--nightly", nightly, "include the n_max = 5 truncation member");
    app.add_option("--out", out, "directory for run outputs");
    CLI11_PARSE(app, argc, argv);

    fs::remove_all(out);
    fs::create_directories(out);
    Runs runs(out);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"eigenenergies", c1_energies},
        {"transition table", c2_table},
        {"golden-rule line set", c3_golden_rule},
        {"dipole matrix element", c4_dipole},
        {"dense-oracle equivalence", c5_dense_oracle},
        {"trace and Hermiticity conservation", c6_conservation},
        {"weak-coupling peak positions", [&] { return c7_peaks(runs); }},
        {"Boltzmann equilibrium", [&] { return c8_boltzmann(runs); }},
        {"broadening trend", [&] { return c9_broadening(runs); }},
        {"low-frequency suppression", [&] { return c10_low_frequency(runs); }},
        {"truncation convergence", [&] { return c11_truncation(runs, nightly); }},
        {"isotropy", [&] { return c12_isotropy(runs); }},
        {"Pade validation", c13_pade},
        {"determinism across workers", [&] { return c14_determinism(runs); }},
        {"dt stability", [&] { return c15_dt(runs); }},
    };

    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) failed.insert(id);
        std::cout << (o.pass ? "PASS" : "FAIL") << fmt(" %2d ", id) << criteria[i].first << ": " << o.detail
                  << fmt(" [%.1f s]", secs) << std::endl;
    }

    std::set<int> expected(known.begin(), known.end());
    if (!only.empty()) {
        std::erase_if(expected, [&](int id) { return std::find(only.begin(), only.end(), id) == only.end(); });
    }
    std::cout << failed.size() << " of " << (only.empty() ? criteria.size() : only.size()) << " criteria failed";
    if (!expected.empty()) std::cout << " (" << expected.size() << " known)";
    std::cout << std::endl;
    return failed == expected ? 0 : 1;
}
