#pragma once

// Run configuration: a small "key = value" format with optional [x], [y], [z]
// sections that override the per-axis bath parameters.
//
//   n_max = 3
//   beta  = 5.0
//   eta   = 1e-4        # all three axes
//   gamma = 1.0
//   components = zz, xx
//
//   [x]
//   eta = 2e-4

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "aoheom/basis.hpp"
#include "aoheom/bath.hpp"
#include "aoheom/hierarchy.hpp"
#include "aoheom/propagator.hpp"
#include "aoheom/spectroscopy.hpp"

namespace aoheom {

struct RunConfig {
    int n_max = 0;
    double beta = 0.0;
    std::array<double, 3> eta{};
    std::array<double, 3> gamma{};
    std::array<int, 3> pade_K{1, 1, 1};
    int depth = 2;
    TruncationMode truncation = TruncationMode::global;
    double dt = 0.1;
    std::size_t n_steps = 3000;
    TerminatorMode terminator = TerminatorMode::eq8;
    RadialMode dipole_radial_mode = RadialMode::unit;
    double mu0 = 1.0;
    std::optional<double> apodization_rate;  // unset: 5 / (n_steps dt)
    int padding = 4;
    std::vector<Component> components{Component{}};
    std::string output_dir = "aoheom_out";
    unsigned workers = 1;
    double equilibration_tolerance = 1e-9;
    std::size_t max_equilibration_steps = 2000000;
    std::vector<int> n_max_list{2, 3, 4, 5};

    // Throws InvalidArgument.
    void validate() const;

    BathSpec bath() const;
    PropagatorConfig propagator() const;
    double effective_apodization_rate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ParseError (with the offending line) on unknown keys, malformed or
// out-of-range values and missing required keys (n_max, beta, eta, gamma).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Emits every field; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

std::string to_string(TerminatorMode mode);
std::string to_string(TruncationMode mode);
std::string to_string(RadialMode mode);

}  // namespace aoheom
