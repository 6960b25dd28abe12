#include "aoheom/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aoheom/errors.hpp"

namespace aoheom {

namespace {

// Saturating binomial coefficient.
std::size_t binomial(std::size_t n, std::size_t k) {
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    }
    if (r > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
        return std::numeric_limits<std::size_t>::max() / 2;
    }
    return static_cast<std::size_t>(std::llround(r));
}

struct Generator {
    const std::vector<int>& mode_limit_group;  // axis of each mode
    int depth;
    TruncationMode truncation;
    std::vector<int> counts;
    std::array<int, 3> axis_sum{};
    int total = 0;
    std::vector<std::vector<int>> out;

    void run(std::size_t j) {
        if (j == counts.size()) {
            out.push_back(counts);
            return;
        }
        const int a = mode_limit_group[j];
        const int room = truncation == TruncationMode::global ? depth - total : depth - axis_sum[a];
        for (int c = 0; c <= room; ++c) {
            counts[j] = c;
            total += c;
            axis_sum[a] += c;
            run(j + 1);
            total -= c;
            axis_sum[a] -= c;
        }
        counts[j] = 0;
    }
};

}  // namespace

std::size_t hierarchy_size(int modes, int depth) {
    if (modes < 0 || depth < 0) throw InvalidArgument("modes and depth must be >= 0");
    return binomial(static_cast<std::size_t>(modes + depth), static_cast<std::size_t>(depth));
}

HierarchyIndexSpace HierarchyIndexSpace::enumerate(std::array<int, 3> per_axis_K, int depth,
                                                   TruncationMode truncation,
                                                   std::size_t max_indices) {
    if (depth < 0) throw InvalidArgument("hierarchy depth must be >= 0");
    for (int K : per_axis_K) {
        if (K < 0) throw InvalidArgument("Pade order per axis must be >= 0");
    }

    HierarchyIndexSpace space;
    space.per_axis_K_ = per_axis_K;
    space.depth_ = depth;
    space.truncation_ = truncation;
    std::vector<int> group;
    for (Axis a : kAxes) {
        for (int k = 0; k <= per_axis_K[static_cast<int>(a)]; ++k) {
            space.mode_axis_.push_back(a);
            space.mode_k_.push_back(k);
            group.push_back(static_cast<int>(a));
        }
    }
    space.n_modes_ = static_cast<int>(group.size());
    const int M = space.n_modes_;

    std::size_t expected = 1;
    if (truncation == TruncationMode::global) {
        expected = hierarchy_size(M, depth);
    } else {
        for (int K : per_axis_K) {
            expected = std::min<std::size_t>(expected * hierarchy_size(K + 1, depth),
                                             std::numeric_limits<std::size_t>::max() / 4);
        }
    }
    if (expected > max_indices) {
        throw CapacityError("hierarchy has " + std::to_string(expected) +
                                " auxiliary operators, above the budget of " +
                                std::to_string(max_indices),
                            expected);
    }

    Generator gen{group, depth, truncation, std::vector<int>(M, 0), {}, 0, {}};
    gen.run(0);
    auto& all = gen.out;
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        int ta = 0;
        int tb = 0;
        for (int c : a) ta += c;
        for (int c : b) tb += c;
        if (ta != tb) return ta < tb;
        return a < b;
    });

    space.indices_.reserve(all.size());
    for (std::size_t p = 0; p < all.size(); ++p) {
        int t = 0;
        for (int c : all[p]) t += c;
        space.lookup_.emplace(all[p], p);
        space.indices_.push_back({std::move(all[p]), t});
    }

    const std::size_t N = space.indices_.size();
    space.neighbors_.assign(N * M * 2, -1);
    space.terminal_.assign(N, 0);
    space.links_.assign(N * M, {});
    std::vector<int> work(M);
    for (std::size_t p = 0; p < N; ++p) {
        const auto& idx = space.indices_[p];
        for (int j = 0; j < M; ++j) {
            if (idx.counts[j] > 0) {
                work = idx.counts;
                --work[j];
                space.neighbors_[(p * M + j) * 2] = static_cast<std::int64_t>(*space.find(work));
            }
            work = idx.counts;
            ++work[j];
            if (auto up = space.find(work)) {
                space.neighbors_[(p * M + j) * 2 + 1] = static_cast<std::int64_t>(*up);
                continue;
            }
            space.terminal_[p] = 1;
            // work = n + e_j is outside the space; express it through m - e_i.
            auto& links = space.links_[p * M + j];
            for (int i = 0; i < M; ++i) {
                if (work[i] == 0) continue;
                --work[i];
                if (auto q = space.find(work)) links.push_back({i, work[i] + 1, *q});
                ++work[i];
            }
        }
    }
    return space;
}

int HierarchyIndexSpace::mode(Axis a, int k) const {
    const int ai = static_cast<int>(a);
    if (k < 0 || k > per_axis_K_[ai]) throw InvalidArgument("mode index out of range");
    int offset = 0;
    for (int b = 0; b < ai; ++b) offset += per_axis_K_[b] + 1;
    return offset + k;
}

std::optional<std::size_t> HierarchyIndexSpace::find(std::span<const int> counts) const {
    auto it = lookup_.find(std::vector<int>(counts.begin(), counts.end()));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::span<const TerminatorLink> HierarchyIndexSpace::terminator_links(std::size_t pos,
                                                                      int mode) const {
    return links_[pos * n_modes_ + mode];
}

std::vector<double> HierarchyIndexSpace::flatten(
    const std::array<std::vector<double>, 3>& per_axis) const {
    std::vector<double> out;
    out.reserve(n_modes_);
    for (Axis a : kAxes) {
        const auto& v = per_axis[static_cast<int>(a)];
        if (static_cast<int>(v.size()) != per_axis_K_[static_cast<int>(a)] + 1) {
            throw InvalidArgument(std::string("frequency list for axis ") + axis_name(a) +
                                  " has the wrong length");
        }
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

double damping_rate(const ADOIndex& index, std::span<const double> nu) {
    if (nu.size() != index.counts.size()) {
        throw InvalidArgument("frequency list does not match the index layout");
    }
    double rate = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) rate += index.counts[j] * nu[j];
    return rate;
}

}  // namespace aoheom
