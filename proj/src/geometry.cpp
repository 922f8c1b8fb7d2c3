#include "reclab/geometry.hpp"

#include "reclab/errors.hpp"
#include "reclab/parallel.hpp"
#include "reclab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace reclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kChunk = 4096;

double wrap_phase(double x) {
    x -= kTwoPi * std::floor(x / kTwoPi);
    return x >= kTwoPi ? 0.0 : x;
}

double circular_separation(double x) {
    x = wrap_phase(x);
    return std::min(x, kTwoPi - x);
}

std::size_t grid_resolution(double scale) {
    return static_cast<std::size_t>(std::ceil(kTwoPi / scale));
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw PreconditionError("phase net: epsilon must lie in (0, 1)");
    }
}

}  // namespace

std::string_view to_string(NetFlavor f) {
    return f == NetFlavor::StateTorus ? "state" : "unitary";
}

std::optional<NetFlavor> net_flavor_from_string(std::string_view s) {
    if (s == "state" || s == "StateTorus") return NetFlavor::StateTorus;
    if (s == "unitary" || s == "UnitaryFamily") return NetFlavor::UnitaryFamily;
    return std::nullopt;
}

std::size_t PhaseNet::free_coordinates() const noexcept {
    return static_cast<std::size_t>(std::count(free_.begin(), free_.end(), true));
}

double PhaseNet::log10_size() const {
    return static_cast<double>(free_coordinates()) * std::log10(static_cast<double>(n_));
}

std::optional<std::uint64_t> PhaseNet::size() const {
    std::uint64_t total = 1;
    const auto limit = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
    for (std::size_t i = 0; i < free_coordinates(); ++i) {
        if (total > limit / n_) return std::nullopt;
        total *= n_;
    }
    return total;
}

double PhaseNet::covering_radius() const noexcept {
    return flavor_ == NetFlavor::StateTorus ? epsilon_ : 0.5 * epsilon_;
}

std::vector<double> PhaseNet::nearest(std::span<const double> phases) const {
    if (phases.size() != dimension()) {
        throw PreconditionError("PhaseNet::nearest: phase vector has wrong length");
    }
    std::vector<double> out(phases.size(), 0.0);
    const double step = kTwoPi / static_cast<double>(n_);
    for (std::size_t k = 0; k < phases.size(); ++k) {
        if (!free_[k]) continue;
        const double rel = wrap_phase(phases[k] - phases[reference_]);
        const auto j = static_cast<std::size_t>(std::llround(rel / step)) % n_;
        out[k] = step * static_cast<double>(j);
    }
    return out;
}

std::vector<std::vector<double>> PhaseNet::enumerate(std::uint64_t cap) const {
    const auto total = size();
    if (!total || *total > cap) {
        throw PreconditionError("PhaseNet::enumerate: net size exceeds enumeration cap");
    }
    std::vector<std::size_t> axes;
    for (std::size_t k = 0; k < dimension(); ++k) {
        if (free_[k]) axes.push_back(k);
    }
    const double step = kTwoPi / static_cast<double>(n_);
    std::vector<std::vector<double>> points;
    points.reserve(*total);
    std::vector<std::size_t> digits(axes.size(), 0);
    for (std::uint64_t i = 0; i < *total; ++i) {
        std::vector<double> x(dimension(), 0.0);
        for (std::size_t a = 0; a < axes.size(); ++a) {
            x[axes[a]] = step * static_cast<double>(digits[a]);
        }
        points.push_back(std::move(x));
        for (std::size_t a = 0; a < axes.size(); ++a) {
            if (++digits[a] < n_) break;
            digits[a] = 0;
        }
    }
    return points;
}

PhaseNet build_phase_net(double epsilon, std::size_t d, NetFlavor flavor,
                         const SpectralState* base) {
    require_epsilon(epsilon);
    if (base) d = base->dimension();
    if (d < 1) throw PreconditionError("phase net: dimension must be >= 1");

    PhaseNet net;
    net.epsilon_ = epsilon;
    net.flavor_ = flavor;
    net.n_ = grid_resolution(flavor == NetFlavor::StateTorus ? epsilon : 0.5 * epsilon);
    net.reference_ = 0;
    net.free_.assign(d, true);
    net.free_[0] = false;
    net.magnitudes_.assign(d, 1.0);
    if (flavor == NetFlavor::StateTorus) {
        for (std::size_t k = 0; k < d; ++k) {
            net.magnitudes_[k] = base ? std::abs(base->amplitudes()[k])
                                      : 1.0 / std::sqrt(static_cast<double>(d));
        }
    }
    return net;
}

PhaseNet build_reduced_phase_net(double epsilon, const SpectralState& base,
                                 const SupportSet& support) {
    require_epsilon(epsilon);
    if (support.indices.empty()) throw PreconditionError("reduced net: empty support");
    PhaseNet net;
    net.epsilon_ = epsilon;
    net.flavor_ = NetFlavor::StateTorus;
    net.n_ = grid_resolution(0.5 * epsilon);
    net.reference_ = support.indices.front();
    net.free_.assign(base.dimension(), false);
    for (std::size_t i : support.indices) {
        if (i >= base.dimension()) throw PreconditionError("reduced net: index out of range");
        net.free_[i] = i != net.reference_;
    }
    net.magnitudes_.resize(base.dimension());
    for (std::size_t k = 0; k < base.dimension(); ++k) {
        net.magnitudes_[k] = std::abs(base.amplitudes()[k]);
    }
    return net;
}

double pure_trace_distance(std::span<const Complex> psi, std::span<const Complex> phi) {
    if (psi.size() != phi.size()) throw PreconditionError("trace distance: length mismatch");
    Complex overlap{0.0, 0.0};
    for (std::size_t k = 0; k < psi.size(); ++k) overlap += std::conj(psi[k]) * phi[k];
    return std::sqrt(std::max(0.0, 1.0 - std::norm(overlap)));
}

double min_phase_euclidean(std::span<const Complex> psi, std::span<const Complex> chi) {
    if (psi.size() != chi.size()) throw PreconditionError("euclidean: length mismatch");
    Complex overlap{0.0, 0.0};
    for (std::size_t k = 0; k < psi.size(); ++k) overlap += std::conj(psi[k]) * chi[k];
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(overlap)));
}

double diagonal_diamond_distance(std::span<const double> theta,
                                 std::span<const double> theta_prime) {
    if (theta.size() != theta_prime.size() || theta.empty()) {
        throw PreconditionError("diamond distance: phase vectors must be non-empty and equal length");
    }
    std::vector<double> delta(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) delta[k] = wrap_phase(theta[k] - theta_prime[k]);
    std::sort(delta.begin(), delta.end());
    double gap = delta.front() + kTwoPi - delta.back();
    for (std::size_t k = 1; k < delta.size(); ++k) gap = std::max(gap, delta[k] - delta[k - 1]);
    return 2.0 * std::sin((kTwoPi - gap) / 4.0);
}

double diamond_distance_grid(std::span<const double> theta, std::span<const double> theta_prime,
                             std::size_t grid) {
    if (theta.size() != theta_prime.size() || theta.empty() || grid == 0) {
        throw PreconditionError("diamond distance: bad arguments");
    }
    std::vector<double> delta(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) delta[k] = theta[k] - theta_prime[k];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid; ++j) {
        const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(grid);
        double worst = 0.0;
        for (double x : delta) worst = std::max(worst, circular_separation(x - phi));
        best = std::min(best, worst);
    }
    // |e^{ia} - e^{ib}| = 2 sin(sep / 2), increasing in the separation.
    return 2.0 * std::sin(best / 2.0);
}

CoveringResult covering_check(const PhaseNet& net, std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1) throw PreconditionError("covering_check: need samples >= 1");
    const std::size_t d = net.dimension();
    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<double> chunk_max(chunks, 0.0);

    parallel_for(chunks, [&](std::size_t c) {
        CounterRng rng(seed, c);
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(samples, begin + kChunk);
        std::vector<double> phases(d);
        double local = 0.0;
        for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& x : phases) x = rng.phase();
            const std::vector<double> point = net.nearest(phases);
            double dist = 0.0;
            if (net.flavor() == NetFlavor::StateTorus) {
                // <psi|psi'> = sum |a_k|^2 e^{i (phi'_k - phi_k)}
                Complex overlap{0.0, 0.0};
                for (std::size_t k = 0; k < d; ++k) {
                    const double m = net.magnitudes()[k];
                    overlap += m * m * std::polar(1.0, point[k] - phases[k]);
                }
                dist = std::sqrt(std::max(0.0, 1.0 - std::norm(overlap)));
            } else {
                dist = diagonal_diamond_distance(phases, point);
            }
            local = std::max(local, dist);
        }
        chunk_max[c] = local;
    });

    CoveringResult out;
    out.samples = samples;
    out.max_distance = *std::max_element(chunk_max.begin(), chunk_max.end());
    out.pass = out.max_distance <= net.covering_radius();
    return out;
}

}  // namespace reclab
