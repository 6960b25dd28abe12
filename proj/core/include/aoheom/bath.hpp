#pragma once

// Drude baths, the [K-1/K] Pade decomposition of the Bose function, and the
// scalar coefficients of the hierarchy coupling operators Theta_k.

#include <array>
#include <vector>

#include "aoheom/basis.hpp"

namespace aoheom {

struct DrudeBath {
    double eta = 0.0;    // coupling strength
    double gamma = 1.0;  // inverse noise correlation time
};

struct BathSpec {
    std::array<DrudeBath, 3> axes{};
    double beta = 1.0;

    const DrudeBath& operator[](Axis a) const { return axes[static_cast<int>(a)]; }
    DrudeBath& operator[](Axis a) { return axes[static_cast<int>(a)]; }

    static BathSpec isotropic(double eta, double gamma, double beta);
    void validate() const;
};

// J(omega) = (eta / pi) gamma^2 omega / (gamma^2 + omega^2), hbar = 1.
double drude_sdf(double omega, double eta, double gamma);

struct PadeScheme {
    int K = 0;
    std::vector<double> xi;     // ascending pole positions
    std::vector<double> kappa;  // weights of x / (x^2 + xi^2)
};

PadeScheme pade_decomposition(int K);

// 1/x + 1/2 + sum_k 2 kappa_k x / (x^2 + xi_k^2), approximating 1 / (1 - e^{-x}).
double bose_approximant(const PadeScheme& scheme, double x);

// 1 / (1 - e^{-x}), evaluated without cancellation.
double bose_exact(double x);

struct ThetaCoefficients {
    double c0_fluct = 0.0;     // coefficient of V^x in Theta_0
    double c0_diss = 0.0;      // coefficient of ([H_S, V])^o in Theta_0
    std::vector<double> ck;    // coefficients of V^x in Theta_k, k = 1..K
};

// nu_0 = gamma, nu_k = xi_k / beta.
std::vector<double> bath_frequencies(const DrudeBath& bath, double beta, const PadeScheme& scheme);

// Throws DegeneratePoleError if gamma^2 and nu_k^2 coincide to 1e-12 relative.
ThetaCoefficients theta_coefficients(const DrudeBath& bath, double beta, const PadeScheme& scheme);

}  // namespace aoheom
