// geometry.hpp: explicit phase-grid coverings of the state torus and of the
// diagonal unitary family, and the global-phase-minimized operator distance
// between commuting unitaries.
#pragma once

#include "reclab/spectral.hpp"
#include "reclab/structure.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace reclab {

enum class NetFlavor { StateTorus, UnitaryFamily };

std::string_view to_string(NetFlavor f);
std::optional<NetFlavor> net_flavor_from_string(std::string_view s);

inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

// Grid net: the reference coordinate has phase 0, every free coordinate runs
// over 2 pi j / n, pinned coordinates keep phase 0.
class PhaseNet {
public:
    double epsilon() const noexcept { return epsilon_; }
    std::size_t dimension() const noexcept { return magnitudes_.size(); }
    std::size_t resolution() const noexcept { return n_; }
    NetFlavor flavor() const noexcept { return flavor_; }
    std::size_t reference() const noexcept { return reference_; }
    std::size_t free_coordinates() const noexcept;
    bool is_free(std::size_t k) const { return free_[k]; }
    // |a_k| of the base state (StateTorus); all ones for unitaries.
    std::span<const double> magnitudes() const noexcept { return magnitudes_; }

    double log10_size() const;
    std::optional<std::uint64_t> size() const;  // absent past 2^63
    // Radius the construction guarantees: eps for states, eps/2 for unitaries.
    double covering_radius() const noexcept;

    // Net point closest to `phases`, coordinate by coordinate on the circle,
    // after removing the reference phase.
    std::vector<double> nearest(std::span<const double> phases) const;

    // All net points as phase vectors; throws past `cap`.
    std::vector<std::vector<double>> enumerate(std::uint64_t cap = kEnumerationCap) const;

private:
    friend PhaseNet build_phase_net(double, std::size_t, NetFlavor, const SpectralState*);
    friend PhaseNet build_reduced_phase_net(double, const SpectralState&, const SupportSet&);

    double epsilon_ = 0.0;
    std::size_t n_ = 1;
    NetFlavor flavor_ = NetFlavor::StateTorus;
    std::size_t reference_ = 0;
    std::vector<bool> free_;
    std::vector<double> magnitudes_;
};

// n = ceil(2 pi / eps) for states, ceil(4 pi / eps) for unitaries. For the
// state torus `base` supplies |a_k|; without it the amplitudes are uniform.
PhaseNet build_phase_net(double epsilon, std::size_t d, NetFlavor flavor,
                         const SpectralState* base = nullptr);

// State-torus net on scale eps whose grid (spacing set by eps/2) runs only over
// the support; coordinates outside it are pinned to a single phase.
PhaseNet build_reduced_phase_net(double epsilon, const SpectralState& base,
                                 const SupportSet& support);

// Pure-state trace distance sqrt(1 - |<psi|phi>|^2).
double pure_trace_distance(std::span<const Complex> psi, std::span<const Complex> phi);
// inf_phi || psi - e^{i phi} chi ||_2 = sqrt(2 - 2 |<psi|chi>|) for unit vectors.
double min_phase_euclidean(std::span<const Complex> psi, std::span<const Complex> chi);

// min_phi max_k |e^{i delta_k} - e^{i phi}|, delta = theta - theta'. Exact:
// the optimal phi bisects the shortest arc holding every delta_k, giving
// 2 sin((2 pi - g) / 4) for the largest circular gap g.
double diagonal_diamond_distance(std::span<const double> theta,
                                 std::span<const double> theta_prime);

// Same quantity by scanning `grid` equally spaced global phases.
double diamond_distance_grid(std::span<const double> theta, std::span<const double> theta_prime,
                             std::size_t grid = 100'000);

struct CoveringResult {
    double max_distance = 0.0;
    bool pass = false;
    std::uint64_t samples = 0;
};

// Draws uniform phase vectors, maps each to its nearest net point and records
// the largest distance (trace distance for states, diagonal_diamond_distance
// for unitaries). Samples are split into fixed-size chunks, each with its own
// seeded stream, so the result does not depend on the worker count.
CoveringResult covering_check(const PhaseNet& net, std::uint64_t samples, std::uint64_t seed);

}  // namespace reclab
