#pragma once

// Linear absorption from the hierarchy response function, golden-rule stick
// spectra and the hydrogenic line table.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "aoheom/basis.hpp"
#include "aoheom/propagator.hpp"

namespace aoheom {

// I_{out,in}: dipole `in` excites, dipole `out` is measured. Written "zx" for out = z, in = x.
struct Component {
    Axis out = Axis::z;
    Axis in = Axis::z;

    std::string name() const { return {axis_name(out), axis_name(in)}; }
    static Component parse(const std::string& s);
    friend bool operator==(const Component&, const Component&) = default;
};

// (1/2)(1/n^2 - 1/n'^2) for n' > n >= 1.
double rydberg_frequency(int n, int n_prime);

// "Lyman", "Balmer", "Paschen", "Brackett", "Pfund", then "n=<n>".
std::string series_label(int n_lower);

struct StickLine {
    double omega = 0.0;
    double weight = 0.0;
    int n = 0;        // lower principal quantum number
    int n_prime = 0;  // upper principal quantum number
    std::string series;
};

struct StickSpectrum {
    std::vector<StickLine> lines;  // ordered by (n, n')
    double partition = 0.0;        // Z = sum_states exp(-beta E)
    double beta = 0.0;
};

// Golden-rule lines summed over degenerate sublevels; |weight| < 1e-14 dropped.
StickSpectrum golden_rule_spectrum(const BasisSet& basis, double beta, const OperatorMatrix& mu_out,
                                   const OperatorMatrix& mu_in);

// rho -> mu rho - rho mu for every ADO.
HierarchyState apply_dipole_commutator(const HierarchyState& state, const OperatorMatrix& mu);

struct ResponseTrace {
    double dt = 0.0;
    std::vector<double> times;    // n_steps + 1 samples starting at t = 0
    std::vector<Complex> values;  // Tr{mu_out rho_0(t)}
    Component component;
    double max_trace_drift = 0.0;        // max_t |Tr rho_0(t) - Tr rho_0(0)|
    double max_hermiticity_defect = 0.0;  // of the anti-Hermitian perturbed state, all ADOs
};

ResponseTrace compute_response(const HierarchyState& equilibrium, const ModelContext& model,
                               const OperatorMatrix& mu_in, const OperatorMatrix& mu_out,
                               const PropagatorConfig& config, Component component = {});

struct SpectrumMetadata {
    double apodization_rate = 0.0;
    int padding = 1;
    double bin_width = 0.0;      // spacing of the returned grid
    double raw_bin_width = 0.0;  // 2 pi / (n_steps dt), before zero padding
};

struct Spectrum {
    std::vector<double> omega;
    std::vector<double> intensity;
    SpectrumMetadata meta;
};

// e^{-t/tau} with tau = n_steps dt / 5.
double default_apodization_rate(std::size_t n_steps, double dt);

// Im[i * sum_j w_j C(t_j) e^{-a t_j} e^{i omega t_j} dt] on omega_m = 2 pi m / (padding n_steps dt),
// m = 0 .. N/2, with trapezoid weights w_j.
Spectrum spectrum_from_response(const ResponseTrace& trace, double apodization_rate,
                                int padding = 4);

// Sum of weight * scale * (width / pi) / ((omega - omega_0)^2 + width^2).
Spectrum convolve_sticks(const StickSpectrum& sticks, double width, std::span<const double> grid,
                         double scale = 1.0);

// Unscaled inverse DFT, X_k = sum_j x_j e^{+2 pi i jk/N}.
std::vector<Complex> inverse_dft(const std::vector<Complex>& x);

struct Peak {
    double omega = 0.0;  // parabolically interpolated
    double height = 0.0;
    std::size_t bin = 0;
};

// Local maxima with height above rel_threshold * global maximum.
std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold = 0.1);

// Local maximum closest to `near` within +-window; throws if there is none.
Peak peak_near(const Spectrum& spectrum, double near, double window);

// Half width at half maximum of the peak returned by peak_near.
double half_width(const Spectrum& spectrum, double near, double window);

// Trapezoid integral over [lo, hi] restricted to grid points.
double integrate(const Spectrum& spectrum, double lo, double hi);

Spectrum normalized(const Spectrum& spectrum);

// max |a - b| over a common grid prefix; the grids must agree.
double linf_difference(const Spectrum& a, const Spectrum& b);

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);
void write_sticks_csv(std::ostream& os, const StickSpectrum& sticks);
void write_response_csv(std::ostream& os, const ResponseTrace& trace);

}  // namespace aoheom
