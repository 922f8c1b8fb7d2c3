// structure.hpp: effective support, effective dimension and the reduced
// state obtained by dropping the low-probability tail.
#pragma once

#include "reclab/spectral.hpp"

#include <cstddef>
#include <vector>

namespace reclab {

struct SupportSet {
    std::vector<std::size_t> indices;  // 0-based, ascending
    double mass = 0.0;                 // sum of p_i over indices
    double delta = 0.0;                // requested tail bound

    std::size_t size() const noexcept { return indices.size(); }
};

// Smallest set carrying at least 1 - delta of the probability (to 1e-12). The descending
// greedy prefix attains the minimum cardinality; equal probabilities are taken
// in index order.
SupportSet effective_support(const SpectralState& state, double delta);

// Inverse participation ratio 1 / sum p_k^2.
double effective_dimension(const SpectralState& state);

// Keeps only the amplitudes in `support`, renormalized.
SpectralState reduce_state(const SpectralState& state, const SupportSet& support);

}  // namespace reclab
