#include "aoheom/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "aoheom/errors.hpp"

namespace aoheom {

BathSpec BathSpec::isotropic(double eta, double gamma, double beta) {
    BathSpec spec;
    spec.axes.fill(DrudeBath{eta, gamma});
    spec.beta = beta;
    return spec;
}

void BathSpec::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be > 0");
    for (Axis a : kAxes) {
        const auto& b = (*this)[a];
        if (!(b.eta >= 0.0) || !std::isfinite(b.eta)) {
            throw InvalidArgument(std::string("eta_") + axis_name(a) + " must be >= 0");
        }
        if (!(b.gamma > 0.0) || !std::isfinite(b.gamma)) {
            throw InvalidArgument(std::string("gamma_") + axis_name(a) + " must be > 0");
        }
    }
}

double drude_sdf(double omega, double eta, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
    return eta / std::numbers::pi * gamma * gamma * omega / (gamma * gamma + omega * omega);
}

namespace {

// Positive eigenvalues of the symmetric tridiagonal matrix with zero diagonal
// and off-diagonal 1 / sqrt(b_m b_{m+1}), b_m = 2(m + offset) + 1.
std::vector<double> positive_tridiagonal_eigenvalues(int size, int offset) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(size);
    Eigen::VectorXd off(size - 1);
    for (int m = 1; m < size; ++m) {
        const double bm = 2.0 * (m + offset) + 1.0;
        const double bn = 2.0 * (m + offset + 1) + 1.0;
        off(m - 1) = 1.0 / std::sqrt(bm * bn);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("Pade tridiagonal eigenproblem failed");
    }
    // Spectrum is symmetric about zero; odd sizes carry an extra zero that can
    // come out with either sign, so take the upper half by position.
    const auto& ev = solver.eigenvalues();
    std::vector<double> out;
    for (Eigen::Index i = size - size / 2; i < size; ++i) {
        if (ev(i) > 0.0) out.push_back(ev(i));
    }
    return out;
}

}  // namespace

PadeScheme pade_decomposition(int K) {
    if (K < 0 || K > 20) throw InvalidArgument("Pade order must be in [0, 20]");
    PadeScheme scheme;
    scheme.K = K;
    if (K == 0) return scheme;

    // Poles: eigenvalues +-2/xi of the 2K x 2K matrix with b_m = 2m + 1.
    const auto lam = positive_tridiagonal_eigenvalues(2 * K, 0);
    // Zeros: eigenvalues +-2/zeta of the (2K-1) x (2K-1) matrix with b_{m+1}.
    const auto lam_tilde = 2 * K - 1 > 1 ? positive_tridiagonal_eigenvalues(2 * K - 1, 1)
                                         : std::vector<double>{};
    if (static_cast<int>(lam.size()) != K || static_cast<int>(lam_tilde.size()) != K - 1) {
        throw NumericalFailure("Pade eigenproblem returned an unexpected spectrum");
    }
    for (double v : lam) scheme.xi.push_back(2.0 / v);
    std::sort(scheme.xi.begin(), scheme.xi.end());
    std::vector<double> zeta;
    for (double v : lam_tilde) zeta.push_back(2.0 / v);

    const double b_next = 2.0 * (K + 1) + 1.0;  // b_{K+1}
    for (int j = 0; j < K; ++j) {
        const double xj2 = scheme.xi[j] * scheme.xi[j];
        double w = 0.5 * K * b_next;
        for (double z : zeta) w *= (z * z - xj2);
        for (int k = 0; k < K; ++k) {
            if (k != j) w /= (scheme.xi[k] * scheme.xi[k] - xj2);
        }
        scheme.kappa.push_back(w);
    }
    for (int j = 0; j < K; ++j) {
        if (!(scheme.kappa[j] > 0.0) || (j > 0 && !(scheme.xi[j] > scheme.xi[j - 1]))) {
            throw NumericalFailure("Pade decomposition produced invalid poles/weights");
        }
    }
    return scheme;
}

double bose_approximant(const PadeScheme& scheme, double x) {
    double f = 1.0 / x + 0.5;
    for (int k = 0; k < scheme.K; ++k) {
        f += 2.0 * scheme.kappa[k] * x / (x * x + scheme.xi[k] * scheme.xi[k]);
    }
    return f;
}

double bose_exact(double x) { return -1.0 / std::expm1(-x); }

std::vector<double> bath_frequencies(const DrudeBath& bath, double beta, const PadeScheme& scheme) {
    std::vector<double> nu{bath.gamma};
    for (double xi : scheme.xi) nu.push_back(xi / beta);
    return nu;
}

ThetaCoefficients theta_coefficients(const DrudeBath& bath, double beta, const PadeScheme& scheme) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
    if (!(bath.gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
    const double g = bath.gamma;
    const double g2 = g * g;
    ThetaCoefficients theta;
    double correction = 1.0;
    for (int k = 0; k < scheme.K; ++k) {
        const double nu = scheme.xi[k] / beta;
        const double denom = g2 - nu * nu;
        if (std::abs(denom) < 1e-12 * g2) {
            std::ostringstream msg;
            msg << "gamma = " << g << " coincides with Pade frequency nu_" << k + 1 << " = " << nu
                << "; perturb gamma slightly";
            throw DegeneratePoleError(msg.str());
        }
        correction += 2.0 * scheme.kappa[k] * g2 / denom;
        theta.ck.push_back(-(bath.eta * g2 / beta) * 2.0 * scheme.kappa[k] * nu / denom);
    }
    theta.c0_fluct = bath.eta * g / beta * correction;
    theta.c0_diss = -bath.eta * g / 2.0;
    return theta;
}

}  // namespace aoheom
