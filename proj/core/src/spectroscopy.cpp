#include "aoheom/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <utility>

#include <unsupported/Eigen/FFT>

#include "aoheom/errors.hpp"

namespace aoheom {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

Component Component::parse(const std::string& s) {
    if (s.size() != 2) throw InvalidArgument("component must be two axis letters, got '" + s + "'");
    return {parse_axis(s[0]), parse_axis(s[1])};
}

double rydberg_frequency(int n, int n_prime) {
    if (n < 1 || n_prime <= n) throw InvalidArgument("rydberg_frequency requires n' > n >= 1");
    return 0.5 * (1.0 / (static_cast<double>(n) * n) - 1.0 / (static_cast<double>(n_prime) * n_prime));
}

std::string series_label(int n_lower) {
    switch (n_lower) {
        case 1: return "Lyman";
        case 2: return "Balmer";
        case 3: return "Paschen";
        case 4: return "Brackett";
        case 5: return "Pfund";
        default: return "n=" + std::to_string(n_lower);
    }
}

StickSpectrum golden_rule_spectrum(const BasisSet& basis, double beta, const OperatorMatrix& mu_out,
                                   const OperatorMatrix& mu_in) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
    const std::size_t dim = basis.dimension();
    if (mu_out.dimension() != dim || mu_in.dimension() != dim) {
        throw InvalidArgument("dipole dimension does not match basis");
    }
    double e_min = 0.0;
    for (const auto& q : basis.states()) e_min = std::min(e_min, eigenenergy(q.n));
    std::vector<double> boltz(dim);
    double z_shifted = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        boltz[i] = std::exp(-beta * (eigenenergy(basis[i].n) - e_min));
        z_shifted += boltz[i];
    }

    std::map<std::pair<int, int>, double> merged;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if (basis[j].n <= basis[i].n) continue;
            // i lower, j upper
            const double w = mu_out(i, j) * mu_in(j, i) * (boltz[i] - boltz[j]) / z_shifted;
            merged[{basis[i].n, basis[j].n}] += w;
        }
    }
    StickSpectrum out;
    out.beta = beta;
    out.partition = z_shifted * std::exp(-beta * e_min);
    for (const auto& [key, w] : merged) {
        if (std::abs(w) < 1e-14) continue;
        out.lines.push_back(
            {rydberg_frequency(key.first, key.second), w, key.first, key.second, series_label(key.first)});
    }
    return out;
}

HierarchyState apply_dipole_commutator(const HierarchyState& state, const OperatorMatrix& mu) {
    if (mu.dimension() != state.dimension()) {
        throw InvalidArgument("dipole dimension does not match the hierarchy state");
    }
    HierarchyState out = state;
    const ComplexMatrix m = mu.entries.cast<Complex>();
    for (std::size_t p = 0; p < state.ados.size(); ++p) {
        out.ados[p].noalias() = m * state.ados[p];
        out.ados[p].noalias() -= state.ados[p] * m;
    }
    return out;
}

ResponseTrace compute_response(const HierarchyState& equilibrium, const ModelContext& model,
                               const OperatorMatrix& mu_in, const OperatorMatrix& mu_out,
                               const PropagatorConfig& config, Component component) {
    config.validate();
    if (mu_out.dimension() != model.dimension()) {
        throw InvalidArgument("dipole dimension does not match the model");
    }
    warn_if_unstable(model, config.dt);
    HierarchyState state = apply_dipole_commutator(equilibrium, mu_in);
    state.time = 0.0;
    const ComplexMatrix observable = mu_out.entries.cast<Complex>();

    ResponseTrace trace;
    trace.dt = config.dt;
    trace.component = component;
    trace.times.reserve(config.n_steps + 1);
    trace.values.reserve(config.n_steps + 1);
    const Complex trace0 = state.reduced().trace();
    auto record = [&] {
        trace.max_trace_drift = std::max(trace.max_trace_drift, std::abs(state.reduced().trace() - trace0));
        trace.times.push_back(static_cast<double>(trace.times.size()) * config.dt);
        // Tr(A B) = sum_ij A_ij B_ji
        trace.values.push_back((observable.transpose().array() * state.reduced().array()).sum());
    };
    record();
    Rk4Integrator integrator(model, config.rhs_options());
    for (std::size_t s = 0; s < config.n_steps; ++s) {
        integrator.step(state, config.dt, s);
        record();
    }
    for (const auto& m : state.ados) {
        trace.max_hermiticity_defect =
            std::max(trace.max_hermiticity_defect, (m + m.adjoint()).cwiseAbs().maxCoeff());
    }
    return trace;
}

double default_apodization_rate(std::size_t n_steps, double dt) {
    return 5.0 / (static_cast<double>(n_steps) * dt);
}

std::vector<Complex> inverse_dft(const std::vector<Complex>& x) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<Complex> out;
    fft.inv(out, x);
    return out;
}

Spectrum spectrum_from_response(const ResponseTrace& trace, double apodization_rate, int padding) {
    if (trace.values.size() < 2 || !(trace.dt > 0.0)) {
        throw InvalidArgument("response trace needs at least two samples and dt > 0");
    }
    if (padding < 1) throw InvalidArgument("padding factor must be >= 1");
    if (apodization_rate < 0.0) throw InvalidArgument("apodization rate must be >= 0");

    const std::size_t last = trace.values.size() - 1;  // = n_steps
    const std::size_t n_fft = static_cast<std::size_t>(padding) * last;
    std::vector<Complex> buffer(n_fft, Complex{});
    for (std::size_t j = 0; j <= last; ++j) {
        const double w = (j == 0 || j == last) ? 0.5 : 1.0;
        const double t = static_cast<double>(j) * trace.dt;
        // With padding 1 the last sample folds onto bin 0, which is exact on this grid.
        buffer[j % n_fft] += w * trace.dt * std::exp(-apodization_rate * t) * trace.values[j];
    }
    const auto transformed = inverse_dft(buffer);

    Spectrum s;
    s.meta.apodization_rate = apodization_rate;
    s.meta.padding = padding;
    s.meta.bin_width = 2.0 * std::numbers::pi / (static_cast<double>(n_fft) * trace.dt);
    s.meta.raw_bin_width = 2.0 * std::numbers::pi / (static_cast<double>(last) * trace.dt);
    const std::size_t n_out = n_fft / 2 + 1;
    s.omega.resize(n_out);
    s.intensity.resize(n_out);
    for (std::size_t m = 0; m < n_out; ++m) {
        s.omega[m] = static_cast<double>(m) * s.meta.bin_width;
        s.intensity[m] = (kI * transformed[m]).imag();
    }
    return s;
}

Spectrum convolve_sticks(const StickSpectrum& sticks, double width, std::span<const double> grid,
                         double scale) {
    if (!(width > 0.0)) throw InvalidArgument("Lorentzian width must be > 0");
    Spectrum s;
    s.omega.assign(grid.begin(), grid.end());
    s.intensity.assign(grid.size(), 0.0);
    for (const auto& line : sticks.lines) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double d = grid[i] - line.omega;
            s.intensity[i] += scale * line.weight * (width / std::numbers::pi) / (d * d + width * width);
        }
    }
    if (grid.size() > 1) s.meta.bin_width = grid[1] - grid[0];
    return s;
}

namespace {

Peak interpolate_peak(const Spectrum& s, std::size_t i) {
    Peak p{s.omega[i], s.intensity[i], i};
    if (i == 0 || i + 1 >= s.intensity.size()) return p;
    const double ym = s.intensity[i - 1];
    const double y0 = s.intensity[i];
    const double yp = s.intensity[i + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom >= 0.0) return p;
    const double shift = 0.5 * (ym - yp) / denom;
    const double h = s.omega[i + 1] - s.omega[i];
    p.omega = s.omega[i] + shift * h;
    p.height = y0 - 0.25 * (ym - yp) * shift;
    return p;
}

bool is_local_max(const std::vector<double>& y, std::size_t i) {
    if (i == 0 || i + 1 >= y.size()) return false;
    return y[i] > y[i - 1] && y[i] >= y[i + 1];
}

}  // namespace

std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold) {
    const auto& y = spectrum.intensity;
    if (y.empty()) return {};
    const double top = *std::max_element(y.begin(), y.end());
    std::vector<Peak> peaks;
    if (!(top > 0.0)) return peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (is_local_max(y, i) && y[i] > rel_threshold * top) peaks.push_back(interpolate_peak(spectrum, i));
    }
    return peaks;
}

Peak peak_near(const Spectrum& spectrum, double near, double window) {
    const auto& y = spectrum.intensity;
    std::size_t best = y.size();
    double best_dist = window;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double dist = std::abs(spectrum.omega[i] - near);
        if (dist <= best_dist && is_local_max(y, i)) {
            best = i;
            best_dist = dist;
        }
    }
    if (best == y.size()) {
        throw NumericalFailure("no spectral peak within " + std::to_string(window) + " of " +
                               std::to_string(near));
    }
    return interpolate_peak(spectrum, best);
}

double half_width(const Spectrum& spectrum, double near, double window) {
    const Peak peak = peak_near(spectrum, near, window);
    const auto& y = spectrum.intensity;
    const auto& x = spectrum.omega;
    const double half = 0.5 * y[peak.bin];
    std::size_t i = peak.bin;
    while (i > 0 && y[i] > half) --i;
    double left = x[i];
    if (y[i] <= half && i < peak.bin) left = x[i] + (half - y[i]) / (y[i + 1] - y[i]) * (x[i + 1] - x[i]);
    std::size_t k = peak.bin;
    while (k + 1 < y.size() && y[k] > half) ++k;
    double right = x[k];
    if (y[k] <= half && k > peak.bin) right = x[k - 1] + (y[k - 1] - half) / (y[k - 1] - y[k]) * (x[k] - x[k - 1]);
    return 0.5 * (right - left);
}

double integrate(const Spectrum& spectrum, double lo, double hi) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < spectrum.omega.size(); ++i) {
        const double a = spectrum.omega[i];
        const double b = spectrum.omega[i + 1];
        if (a < lo || b > hi) continue;
        sum += 0.5 * (b - a) * (spectrum.intensity[i] + spectrum.intensity[i + 1]);
    }
    return sum;
}

Spectrum normalized(const Spectrum& spectrum) {
    Spectrum out = spectrum;
    if (out.intensity.empty()) return out;
    const double top = *std::max_element(out.intensity.begin(), out.intensity.end());
    if (!(top > 0.0)) throw NumericalFailure("cannot normalise a spectrum without a positive maximum");
    for (double& v : out.intensity) v /= top;
    return out;
}

double linf_difference(const Spectrum& a, const Spectrum& b) {
    const std::size_t n = std::min(a.omega.size(), b.omega.size());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(a.omega[i] - b.omega[i]) > 1e-9 * (1.0 + std::abs(a.omega[i]))) {
            throw InvalidArgument("spectra are on different frequency grids");
        }
        d = std::max(d, std::abs(a.intensity[i] - b.intensity[i]));
    }
    return d;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum) {
    const auto old = os.precision(17);
    os << "omega,intensity\n";
    for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
        os << spectrum.omega[i] << ',' << spectrum.intensity[i] << '\n';
    }
    os.precision(old);
}

void write_sticks_csv(std::ostream& os, const StickSpectrum& sticks) {
    const auto old = os.precision(17);
    os << "omega,weight,n,n_prime,series\n";
    for (const auto& l : sticks.lines) {
        os << l.omega << ',' << l.weight << ',' << l.n << ',' << l.n_prime << ',' << l.series << '\n';
    }
    os.precision(old);
}

void write_response_csv(std::ostream& os, const ResponseTrace& trace) {
    const auto old = os.precision(17);
    os << "t,re,im\n";
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        os << trace.times[i] << ',' << trace.values[i].real() << ',' << trace.values[i].imag() << '\n';
    }
    os.precision(old);
}

}  // namespace aoheom
