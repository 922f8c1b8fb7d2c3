#include "reclab/structure.hpp"

#include "reclab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reclab {

SupportSet effective_support(const SpectralState& state, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw PreconditionError("effective_support: delta must lie in [0, 1)");
    }
    const auto p = state.probabilities();
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return p[i] > p[j]; });

    // tail[m] = mass outside the first m sorted entries, summed from the
    // small end so an all-zero tail is exactly zero.
    std::vector<double> tail(p.size() + 1, 0.0);
    for (std::size_t m = p.size(); m-- > 0;) tail[m] = tail[m + 1] + p[order[m]];

    // absorbs round-off in the tail sums, e.g. ten levels of 0.1 at delta = 0.5
    constexpr double kSlack = 1e-12;
    std::size_t m = 1;
    while (m < p.size() && tail[m] > delta + kSlack) ++m;

    SupportSet out;
    out.delta = delta;
    out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(out.indices.begin(), out.indices.end());
    for (std::size_t i : out.indices) out.mass += p[i];
    return out;
}

double effective_dimension(const SpectralState& state) {
    double ipr = 0.0;
    for (double p : state.probabilities()) ipr += p * p;
    return 1.0 / ipr;
}

SpectralState reduce_state(const SpectralState& state, const SupportSet& support) {
    if (support.indices.empty()) throw PreconditionError("reduce_state: empty support");
    std::vector<double> lam;
    std::vector<Complex> amps;
    double mass = 0.0;
    for (std::size_t i : support.indices) {
        if (i >= state.dimension()) throw PreconditionError("reduce_state: index out of range");
        lam.push_back(state.eigenvalues()[i]);
        amps.push_back(state.amplitudes()[i]);
        mass += state.probabilities()[i];
    }
    if (!(mass > 0.0)) throw PreconditionError("reduce_state: support carries zero mass");
    const double scale = 1.0 / std::sqrt(mass);
    for (auto& a : amps) a *= scale;
    return SpectralState::validate(std::move(lam), std::move(amps));
}

}  // namespace reclab
