#include "aoheom/basis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "aoheom/errors.hpp"

namespace aoheom {

namespace {

constexpr double kPi = std::numbers::pi;

void require_valid(int n, int l) {
    if (n < 1 || l < 0 || l >= n) {
        throw InvalidArgument("invalid hydrogenic quantum numbers n=" + std::to_string(n) +
                              " l=" + std::to_string(l));
    }
}

double direction_cosine(Axis axis, double cos_theta, double sin_theta, double phi) {
    switch (axis) {
        case Axis::x: return sin_theta * std::cos(phi);
        case Axis::y: return sin_theta * std::sin(phi);
        case Axis::z: return cos_theta;
    }
    return 0.0;
}

}  // namespace

char axis_name(Axis a) {
    switch (a) {
        case Axis::x: return 'x';
        case Axis::y: return 'y';
        case Axis::z: return 'z';
    }
    return '?';
}

Axis parse_axis(char c) {
    switch (c) {
        case 'x': case 'X': return Axis::x;
        case 'y': case 'Y': return Axis::y;
        case 'z': case 'Z': return Axis::z;
        default: break;
    }
    throw InvalidArgument(std::string("unknown axis '") + c + "'");
}

std::string QuantumNumbers::label() const {
    return std::to_string(n) + "." + std::to_string(l) + "." + std::to_string(m);
}

BasisSet BasisSet::from_states(std::vector<QuantumNumbers> states) {
    if (states.empty()) throw InvalidArgument("basis must contain at least one state");
    for (const auto& q : states) {
        if (!q.valid()) throw InvalidArgument("invalid quantum numbers " + q.label());
    }
    std::sort(states.begin(), states.end());
    if (std::adjacent_find(states.begin(), states.end()) != states.end()) {
        throw InvalidArgument("duplicate state in basis");
    }
    BasisSet basis;
    basis.n_max_ = std::max_element(states.begin(), states.end(),
                                    [](const auto& a, const auto& b) { return a.n < b.n; })
                       ->n;
    basis.states_ = std::move(states);
    return basis;
}

int BasisSet::l_max() const noexcept {
    int l = 0;
    for (const auto& q : states_) l = std::max(l, q.l);
    return l;
}

std::optional<std::size_t> BasisSet::index_of(const QuantumNumbers& q) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), q);
    if (it == states_.end() || *it != q) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
}

BasisSet enumerate_basis(int n_max) {
    if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
    if (n_max > 10) {
        std::cerr << "warning: n_max = " << n_max
                  << " exceeds the practical cap of 10; expect long run times\n";
    }
    std::vector<QuantumNumbers> states;
    for (int n = 1; n <= n_max; ++n)
        for (int l = 0; l < n; ++l)
            for (int m = -l; m <= l; ++m) states.push_back({n, l, m});
    return BasisSet::from_states(std::move(states));
}

double eigenenergy(int n) {
    if (n < 1) throw InvalidArgument("principal quantum number must be >= 1");
    return -0.5 / (static_cast<double>(n) * n);
}

double associated_laguerre(int k, int alpha, double x) {
    if (k < 0 || alpha < 0) throw InvalidArgument("Laguerre degree and order must be >= 0");
    return std::assoc_laguerre(static_cast<unsigned>(k), static_cast<unsigned>(alpha), x);
}

double associated_legendre(int l, int m, double x) {
    m = std::abs(m);
    if (l < 0 || m > l) throw InvalidArgument("associated Legendre requires 0 <= |m| <= l");
    // sph_legendre carries (-1)^m; undo it
    const double v = std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(m),
                                       std::acos(std::clamp(x, -1.0, 1.0)));
    return m % 2 ? -v : v;
}

double real_spherical_harmonic(int l, int m, double theta, double phi) {
    if (l < 0 || std::abs(m) > l) throw InvalidArgument("real harmonic requires |m| <= l");
    const double legendre = associated_legendre(l, m, std::cos(theta));
    if (m == 0) return legendre;
    const double am = std::abs(m);
    return std::numbers::sqrt2 * legendre * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

double radial_wavefunction(int n, int l, double r) {
    require_valid(n, l);
    if (r < 0.0) throw InvalidArgument("radius must be non-negative");
    const double nn = n;
    const double log_norm = 3.0 * std::log(2.0 / nn) + std::lgamma(n - l + 0.0) -
                            std::log(2.0 * nn) - std::lgamma(n + l + 1.0);
    const double rho = 2.0 * r / nn;
    return std::exp(0.5 * log_norm - r / nn) * std::pow(rho, l) *
           associated_laguerre(n - l - 1, 2 * l + 1, rho);
}

double radial_integral(int n, int l, int n_prime, int l_prime, int power) {
    require_valid(n, l);
    require_valid(n_prime, l_prime);
    if (power != 0 && power != 1) throw InvalidArgument("radial power must be 0 or 1");

    const int nm = std::max(n, n_prime);
    const double r_cut = 40.0 * nm * nm;
    auto integrand = [&](double r) {
        return radial_wavefunction(n_prime, l_prime, r) * (power == 1 ? r : 1.0) *
               radial_wavefunction(n, l, r) * r * r;
    };
    constexpr double tol = 1e-10;
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, r_cut, 30, tol * 1e-2, &error, &l1);
    if (!std::isfinite(value) || error > tol * std::max(std::abs(value), l1)) {
        std::ostringstream msg;
        msg << "radial quadrature did not converge for (" << n << "," << l << ")-(" << n_prime
            << "," << l_prime << "), error estimate " << error;
        throw QuadratureFailure(msg.str(), error);
    }
    return value;
}

double angular_integral(int l, int m, int l_prime, int m_prime, Axis axis) {
    if (std::abs(m) > l || std::abs(m_prime) > l_prime) {
        throw InvalidArgument("angular integral requires |m| <= l");
    }
    // 40 points integrate the polynomial in cos(theta) exactly up to degree 79
    if (std::max(l, l_prime) > kMaxAngularL) throw InvalidArgument("angular integral supports l <= 38");
    const int n_phi = 2 * std::max(l, l_prime) + 2;
    const double dphi = 2.0 * kPi / n_phi;
    auto ring = [&](double ct) {
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const double theta = std::acos(ct);
        double sum = 0.0;
        for (int j = 0; j < n_phi; ++j) {
            const double phi = j * dphi;
            sum += real_spherical_harmonic(l, m, theta, phi) * direction_cosine(axis, ct, st, phi) *
                   real_spherical_harmonic(l_prime, m_prime, theta, phi);
        }
        return sum * dphi;
    };
    return boost::math::quadrature::gauss<double, 40>::integrate(ring, -1.0, 1.0);
}

std::string to_string(OperatorLabel label) {
    switch (label) {
        case OperatorLabel::H_S: return "H_S";
        case OperatorLabel::V_x: return "V_x";
        case OperatorLabel::V_y: return "V_y";
        case OperatorLabel::V_z: return "V_z";
        case OperatorLabel::mu_x: return "mu_x";
        case OperatorLabel::mu_y: return "mu_y";
        case OperatorLabel::mu_z: return "mu_z";
    }
    return "?";
}

OperatorLabel position_label(Axis a) {
    constexpr std::array<OperatorLabel, 3> labels{OperatorLabel::V_x, OperatorLabel::V_y,
                                                  OperatorLabel::V_z};
    return labels[static_cast<int>(a)];
}

OperatorLabel dipole_label(Axis a) {
    constexpr std::array<OperatorLabel, 3> labels{OperatorLabel::mu_x, OperatorLabel::mu_y,
                                                  OperatorLabel::mu_z};
    return labels[static_cast<int>(a)];
}

OperatorMatrix hamiltonian_matrix(const BasisSet& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    OperatorMatrix h{OperatorLabel::H_S, Eigen::MatrixXd::Zero(dim, dim)};
    for (Eigen::Index i = 0; i < dim; ++i) h.entries(i, i) = eigenenergy(basis[i].n);
    return h;
}

OperatorMatrix position_operator_matrix(const BasisSet& basis, Axis axis, RadialMode radial_mode) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    const int power = radial_mode == RadialMode::linear ? 1 : 0;
    OperatorMatrix op{position_label(axis), Eigen::MatrixXd::Zero(dim, dim)};

    std::map<std::tuple<int, int, int, int>, double> radial_cache;
    std::map<std::tuple<int, int, int, int>, double> angular_cache;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& a = basis[i];
        for (Eigen::Index j = i; j < dim; ++j) {
            const auto& b = basis[j];
            // Only |dl| = 1 survives the angular integration.
            if (std::abs(a.l - b.l) != 1) continue;
            const auto akey = std::make_tuple(a.l, a.m, b.l, b.m);
            auto ait = angular_cache.find(akey);
            if (ait == angular_cache.end()) {
                ait = angular_cache.emplace(akey, angular_integral(a.l, a.m, b.l, b.m, axis)).first;
            }
            if (std::abs(ait->second) < 1e-13) continue;
            const auto rkey = std::make_tuple(std::min(a, b).n, std::min(a, b).l,
                                              std::max(a, b).n, std::max(a, b).l);
            auto rit = radial_cache.find(rkey);
            if (rit == radial_cache.end()) {
                const auto& lo = std::min(a, b);
                const auto& hi = std::max(a, b);
                rit = radial_cache.emplace(rkey, radial_integral(lo.n, lo.l, hi.n, hi.l, power))
                          .first;
            }
            op.entries(i, j) = rit->second * ait->second;
            op.entries(j, i) = op.entries(i, j);
        }
    }
    op.entries = (0.5 * (op.entries + op.entries.transpose())).eval();
    return op;
}

OperatorMatrix dipole_operator_matrix(const BasisSet& basis, Axis axis, RadialMode radial_mode,
                                      double mu0) {
    auto op = position_operator_matrix(basis, axis, radial_mode);
    op.entries *= mu0;
    op.label = dipole_label(axis);
    return op;
}

void write_matrix_csv(std::ostream& os, const BasisSet& basis, const OperatorMatrix& op) {
    if (op.dimension() != basis.dimension()) {
        throw InvalidArgument("operator dimension does not match basis");
    }
    const auto old_precision = os.precision(17);
    os << "state";
    for (const auto& q : basis.states()) os << ',' << q.label();
    os << '\n';
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        os << basis[i].label();
        for (std::size_t j = 0; j < basis.dimension(); ++j) os << ',' << op(i, j);
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace aoheom
