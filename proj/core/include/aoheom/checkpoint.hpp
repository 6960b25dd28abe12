#pragma once

// Versioned text dump of a full hierarchy state. Floating-point values are
// written as hexadecimal literals so a save/load cycle is bit-exact.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "aoheom/bath.hpp"
#include "aoheom/basis.hpp"
#include "aoheom/hierarchy.hpp"
#include "aoheom/propagator.hpp"

namespace aoheom {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointHeader {
    int version = kCheckpointVersion;
    std::vector<QuantumNumbers> states;
    BathSpec bath;
    std::array<int, 3> pade_K{};
    int depth = 0;
    TruncationMode truncation = TruncationMode::global;
    double time = 0.0;

    static CheckpointHeader from_model(const ModelContext& model, double time);
};

struct Checkpoint {
    CheckpointHeader header;
    HierarchyState state;
};

void write_checkpoint(std::ostream& os, const CheckpointHeader& header, const HierarchyState& state);
void write_checkpoint(const std::string& path, const CheckpointHeader& header,
                      const HierarchyState& state);

// Rebuilds the index space from the header and checks the stored labels against it.
Checkpoint read_checkpoint(std::istream& is);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace aoheom
