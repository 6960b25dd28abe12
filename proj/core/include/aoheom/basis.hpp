#pragma once

// Hydrogenic eigenbasis |n l m> (Z = 1, atomic units) with real spherical
// harmonics, and the dense operator matrices built on it.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aoheom {

enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

char axis_name(Axis a);
Axis parse_axis(char c);

struct QuantumNumbers {
    int n = 1;
    int l = 0;
    int m = 0;

    bool valid() const noexcept { return n >= 1 && l >= 0 && l < n && m >= -l && m <= l; }
    // "n.l.m", used as CSV header labels.
    std::string label() const;

    friend auto operator<=>(const QuantumNumbers&, const QuantumNumbers&) = default;
};

class BasisSet {
public:
    BasisSet() = default;

    // Arbitrary subset of hydrogenic states, kept in (n, l, m) order.
    static BasisSet from_states(std::vector<QuantumNumbers> states);

    int n_max() const noexcept { return n_max_; }
    int l_max() const noexcept;
    std::size_t dimension() const noexcept { return states_.size(); }
    const std::vector<QuantumNumbers>& states() const noexcept { return states_; }
    const QuantumNumbers& operator[](std::size_t i) const { return states_[i]; }
    std::optional<std::size_t> index_of(const QuantumNumbers& q) const;

    friend bool operator==(const BasisSet&, const BasisSet&) = default;

private:
    int n_max_ = 0;
    std::vector<QuantumNumbers> states_;
};

// All states with n <= n_max, lexicographic in (n, l, m). n_max above 10 is
// accepted but warned about on stderr.
BasisSet enumerate_basis(int n_max);

// -1 / (2 n^2)
double eigenenergy(int n);

double radial_wavefunction(int n, int l, double r);
double real_spherical_harmonic(int l, int m, double theta, double phi);

// Normalised associated Legendre function without the Condon-Shortley phase,
// N_l^|m| P_l^|m|(x), and the associated Laguerre polynomial L_k^(a)(x).
double associated_legendre(int l, int m, double x);
double associated_laguerre(int k, int alpha, double x);

enum class RadialMode { linear, unit };

// \int_0^inf R_{n'l'}(r) r^power R_{nl}(r) r^2 dr, power in {0, 1}.
double radial_integral(int n, int l, int n_prime, int l_prime, int power);

// \int Y_{lm} d_axis Y_{l'm'} dOmega with d = (sin t cos p, sin t sin p, cos t),
// by product Gauss-Legendre x trapezoid quadrature. l, l' <= kMaxAngularL.
inline constexpr int kMaxAngularL = 38;
double angular_integral(int l, int m, int l_prime, int m_prime, Axis axis);

enum class OperatorLabel { H_S, V_x, V_y, V_z, mu_x, mu_y, mu_z };

std::string to_string(OperatorLabel label);
OperatorLabel position_label(Axis a);
OperatorLabel dipole_label(Axis a);

struct OperatorMatrix {
    OperatorLabel label = OperatorLabel::H_S;
    Eigen::MatrixXd entries;

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries.rows()); }
    double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

OperatorMatrix hamiltonian_matrix(const BasisSet& basis);

// V_axis (radial_mode = linear) or the direction-cosine operator (unit).
OperatorMatrix position_operator_matrix(const BasisSet& basis, Axis axis,
                                        RadialMode radial_mode = RadialMode::linear);

// mu0 * position_operator_matrix(...), labelled as a dipole.
OperatorMatrix dipole_operator_matrix(const BasisSet& basis, Axis axis, RadialMode radial_mode,
                                      double mu0 = 1.0);

// CSV with a header row of state labels and one row per basis state.
void write_matrix_csv(std::ostream& os, const BasisSet& basis, const OperatorMatrix& op);

}  // namespace aoheom
