#pragma once

// Multi-index bookkeeping for the auxiliary density operators (ADOs).
//
// Each bath axis a contributes K_a + 1 "modes" (k = 0 is the Drude pole, k >= 1
// the Pade poles). Modes are laid out axis-major: mode(a, k) = sum_{b<a}(K_b+1) + k.
// An ADO is labelled by one non-negative count per mode; its tier is the sum.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "aoheom/basis.hpp"

namespace aoheom {

struct ADOIndex {
    std::vector<int> counts;  // one entry per mode
    int tier = 0;

    bool is_zero() const noexcept { return tier == 0; }
    friend bool operator==(const ADOIndex&, const ADOIndex&) = default;
};

enum class TruncationMode {
    global,   // sum over all modes <= depth
    per_bath  // sum over the modes of each axis <= depth
};

// Term of the closure for a missing upward neighbour m = n + e_j:
// m_{mode} * Theta_{mode} acting on rho at `position` (= m - e_mode).
struct TerminatorLink {
    int mode = 0;
    int multiplicity = 0;
    std::size_t position = 0;
};

class HierarchyIndexSpace {
public:
    static constexpr std::size_t kDefaultMaxIndices = 2'000'000;

    HierarchyIndexSpace() = default;

    static HierarchyIndexSpace enumerate(std::array<int, 3> per_axis_K, int depth,
                                         TruncationMode mode = TruncationMode::global,
                                         std::size_t max_indices = kDefaultMaxIndices);

    std::size_t size() const noexcept { return indices_.size(); }
    int depth() const noexcept { return depth_; }
    TruncationMode truncation() const noexcept { return truncation_; }
    const std::array<int, 3>& per_axis_K() const noexcept { return per_axis_K_; }
    int n_modes() const noexcept { return n_modes_; }
    int mode(Axis a, int k) const;
    Axis mode_axis(int mode) const { return mode_axis_[mode]; }
    int mode_k(int mode) const { return mode_k_[mode]; }

    const ADOIndex& operator[](std::size_t pos) const { return indices_[pos]; }
    const std::vector<ADOIndex>& indices() const noexcept { return indices_; }

    std::optional<std::size_t> find(std::span<const int> counts) const;

    std::optional<std::size_t> neighbor(std::size_t pos, Axis a, int k, int direction) const {
        return neighbor(pos, mode(a, k), direction);
    }
    std::optional<std::size_t> neighbor(std::size_t pos, int mode, int direction) const {
        const auto v = neighbors_[(pos * n_modes_ + mode) * 2 + (direction > 0 ? 1 : 0)];
        if (v < 0) return std::nullopt;
        return static_cast<std::size_t>(v);
    }

    // True when some upward neighbour is missing (the truncation shell).
    bool is_terminal(std::size_t pos) const { return terminal_[pos] != 0; }

    // Closure terms for the missing neighbour pos + e_mode; empty if it exists.
    std::span<const TerminatorLink> terminator_links(std::size_t pos, int mode) const;

    // Per-axis frequency lists (nu_0 .. nu_K) flattened into mode order.
    std::vector<double> flatten(const std::array<std::vector<double>, 3>& per_axis) const;

    friend bool operator==(const HierarchyIndexSpace& a, const HierarchyIndexSpace& b) {
        return a.per_axis_K_ == b.per_axis_K_ && a.depth_ == b.depth_ &&
               a.truncation_ == b.truncation_;
    }

private:
    std::array<int, 3> per_axis_K_{};
    int depth_ = 0;
    TruncationMode truncation_ = TruncationMode::global;
    int n_modes_ = 0;
    std::vector<Axis> mode_axis_;
    std::vector<int> mode_k_;
    std::vector<ADOIndex> indices_;
    std::map<std::vector<int>, std::size_t> lookup_;
    std::vector<std::int64_t> neighbors_;
    std::vector<char> terminal_;
    std::vector<std::vector<TerminatorLink>> links_;
};

// Number of multi-indices over `modes` modes with tier <= depth: C(modes + depth, depth).
std::size_t hierarchy_size(int modes, int depth);

// sum_j counts_j * nu_j, with nu in mode order (see HierarchyIndexSpace::flatten).
double damping_rate(const ADOIndex& index, std::span<const double> nu);

}  // namespace aoheom
