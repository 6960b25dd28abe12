#include <cmath>
#include <numbers>
#include <sstream>

#include "aoheom/basis.hpp"
#include "aoheom/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aoheom;

TEST_SUITE("basis") {

TEST_CASE("enumeration order and size") {
    const auto b2 = enumerate_basis(2);
    REQUIRE(b2.dimension() == 5);
    CHECK(b2[0] == QuantumNumbers{1, 0, 0});
    CHECK(b2[1] == QuantumNumbers{2, 0, 0});
    CHECK(b2[2] == QuantumNumbers{2, 1, -1});
    CHECK(b2[3] == QuantumNumbers{2, 1, 0});
    CHECK(b2[4] == QuantumNumbers{2, 1, 1});
    CHECK(enumerate_basis(1).dimension() == 1);
    CHECK(enumerate_basis(5).dimension() == 55);
    CHECK_THROWS_AS(enumerate_basis(0), InvalidArgument);
}

TEST_CASE("from_states validates and sorts") {
    const auto b = BasisSet::from_states({{2, 1, 0}, {1, 0, 0}});
    CHECK(b[0] == QuantumNumbers{1, 0, 0});
    CHECK(b.index_of({2, 1, 0}) == 1);
    CHECK_THROWS_AS(BasisSet::from_states({{2, 2, 0}}), InvalidArgument);
    CHECK_THROWS_AS(BasisSet::from_states({{1, 0, 0}, {1, 0, 0}}), InvalidArgument);
}

TEST_CASE("eigenenergies") {
    for (int n = 1; n <= 5; ++n) CHECK(std::abs(eigenenergy(n) + 0.5 / (n * n)) < 1e-15);
    CHECK(eigenenergy(1) == -0.5);
    CHECK(std::abs(eigenenergy(2) - eigenenergy(1) - 0.375) < 1e-15);
}

TEST_CASE("Hamiltonian is diagonal with degenerate shells") {
    const auto b = enumerate_basis(3);
    const auto H = hamiltonian_matrix(b);
    CHECK(H.label == OperatorLabel::H_S);
    for (std::size_t i = 0; i < b.dimension(); ++i) {
        for (std::size_t j = 0; j < b.dimension(); ++j) {
            CHECK(H(i, j) == (i == j ? eigenenergy(b[i].n) : 0.0));
        }
    }
}

TEST_CASE("radial functions are normalised and match the closed form") {
    for (int n = 1; n <= 5; ++n) {
        for (int l = 0; l < n; ++l) {
            CHECK(std::abs(radial_integral(n, l, n, l, 0) - 1.0) < 1e-10);
            CHECK(std::abs(radial_wavefunction(n, l, 1.3) - oracle::radial(n, l, 1.3)) < 1e-12);
        }
    }
    CHECK(std::abs(radial_wavefunction(1, 0, 0.0) - 2.0) < 1e-14);
}

TEST_CASE("radial integrals against Simpson quadrature") {
    const int pairs[][4] = {{1, 0, 2, 1}, {2, 1, 3, 2}, {3, 0, 4, 1}, {2, 0, 5, 1}, {4, 3, 5, 2}, {5, 4, 5, 3}};
    for (const auto& p : pairs) {
        const double lib = radial_integral(p[0], p[1], p[2], p[3], 1);
        const double ref = oracle::radial_integral(p[0], p[1], p[2], p[3], 1);
        CHECK(std::abs(lib - ref) < 1e-9);
    }
    // radial part of <1s|z|2p_z>
    CHECK(std::abs(radial_integral(1, 0, 2, 1, 1) - 128.0 * std::sqrt(6.0) / 243.0) < 1e-12);
}

TEST_CASE("real spherical harmonics are orthonormal up to l = 4") {
    std::vector<std::pair<int, int>> lm;
    for (int l = 0; l <= 4; ++l)
        for (int m = -l; m <= l; ++m) lm.emplace_back(l, m);
    for (std::size_t a = 0; a < lm.size(); ++a) {
        for (std::size_t b = a; b < lm.size(); ++b) {
            const double g = oracle::sphere_integral([&](double t, double p) {
                return real_spherical_harmonic(lm[a].first, lm[a].second, t, p) *
                       real_spherical_harmonic(lm[b].first, lm[b].second, t, p);
            });
            CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-4);
        }
    }
}

TEST_CASE("angular integrals against brute-force sphere quadrature") {
    const auto dir = [](Axis a, double t, double p) {
        switch (a) {
            case Axis::x: return std::sin(t) * std::cos(p);
            case Axis::y: return std::sin(t) * std::sin(p);
            default: return std::cos(t);
        }
    };
    for (Axis a : kAxes) {
        for (int l = 0; l <= 3; ++l) {
            for (int m = -l; m <= l; ++m) {
                for (int lp = 0; lp <= 3; ++lp) {
                    for (int mp = -lp; mp <= lp; ++mp) {
                        const double lib = angular_integral(l, m, lp, mp, a);
                        const double ref = oracle::sphere_integral(
                            [&](double t, double p) {
                                return real_spherical_harmonic(l, m, t, p) * dir(a, t, p) *
                                       real_spherical_harmonic(lp, mp, t, p);
                            },
                            200, 200);
                        CHECK(std::abs(lib - ref) < 2e-4);
                        if (std::abs(l - lp) != 1) CHECK(std::abs(lib) < 1e-13);
                    }
                }
            }
        }
    }
}

TEST_CASE("position operator: closed-form element, symmetry, selection rules") {
    const auto b = enumerate_basis(3);
    const auto z = position_operator_matrix(b, Axis::z, RadialMode::linear);
    const auto i1s = *b.index_of({1, 0, 0});
    const auto i2pz = *b.index_of({2, 1, 0});
    CHECK(std::abs(z(i1s, i2pz) - 128.0 * std::sqrt(6.0) / (243.0 * std::sqrt(3.0))) < 1e-10);

    for (Axis a : kAxes) {
        const auto V = position_operator_matrix(b, a, RadialMode::linear);
        CHECK(V.label == position_label(a));
        CHECK((V.entries - V.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (std::size_t i = 0; i < b.dimension(); ++i) {
            for (std::size_t j = 0; j < b.dimension(); ++j) {
                const int dl = std::abs(b[i].l - b[j].l);
                if (dl != 1) CHECK(std::abs(V(i, j)) < 1e-10);
            }
        }
    }
    // m-selection: z keeps m, x and y change |m| by one
    for (std::size_t i = 0; i < b.dimension(); ++i) {
        for (std::size_t j = 0; j < b.dimension(); ++j) {
            if (b[i].m != b[j].m) CHECK(std::abs(z(i, j)) < 1e-10);
        }
    }
}

TEST_CASE("dipole operator: unit mode drops the radial power") {
    const auto b = enumerate_basis(2);
    const auto mu = dipole_operator_matrix(b, Axis::z, RadialMode::unit, 1.0);
    CHECK(mu.label == OperatorLabel::mu_z);
    const double expected = oracle::radial_integral(1, 0, 2, 1, 0) / std::sqrt(3.0);
    CHECK(std::abs(mu(*b.index_of({1, 0, 0}), *b.index_of({2, 1, 0})) - expected) < 1e-9);
    const auto mu2 = dipole_operator_matrix(b, Axis::z, RadialMode::linear, 2.0);
    const auto V = position_operator_matrix(b, Axis::z, RadialMode::linear);
    CHECK((mu2.entries - 2.0 * V.entries).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("matrix CSV has a header and one row per state") {
    const auto b = enumerate_basis(2);
    std::ostringstream os;
    write_matrix_csv(os, b, hamiltonian_matrix(b));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "state,1.0.0,2.0.0,2.1.-1,2.1.0,2.1.1");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5);
}

}  // TEST_SUITE
