// spectral.hpp: pure states in the Hamiltonian eigenbasis, survival fidelity,
// spectral moments and the double commutator X_H = -[H,[H,psi0]].
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace reclab {

using Complex = std::complex<double>;

// Relative band within which an input norm is silently renormalized.
inline constexpr double kNormBand = 1e-6;
// Largest dimension for which dense operators are built.
inline constexpr std::size_t kDenseLimit = 512;

// |psi0> = sum_k a_k |k>, H|k> = lambda_k |k>. Immutable once validated.
class SpectralState {
public:
    // validate_state: checks lengths and finiteness, renormalizes when
    // sum |a_k|^2 lies in [1 - kNormBand, 1 + kNormBand], throws otherwise.
    static SpectralState validate(std::vector<double> eigenvalues,
                                  std::vector<Complex> amplitudes);

    // Real non-negative amplitudes sqrt(p_k).
    static SpectralState from_probabilities(std::vector<double> eigenvalues,
                                            std::span<const double> probabilities);

    std::size_t dimension() const noexcept { return eigenvalues_.size(); }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    std::span<const double> probabilities() const noexcept { return probabilities_; }

    // Probability-weighted mean energy, computed relative to a populated level
    // so that zero-variance states give exactly zero centered energies.
    double mean_energy() const noexcept { return mean_; }
    // lambda_k - <H>.
    std::span<const double> centered_energies() const noexcept { return centered_; }

private:
    SpectralState() = default;

    std::vector<double> eigenvalues_;
    std::vector<Complex> amplitudes_;
    std::vector<double> probabilities_;
    std::vector<double> centered_;
    double mean_ = 0.0;
};

inline SpectralState validate_state(std::vector<double> eigenvalues,
                                    std::vector<Complex> amplitudes) {
    return SpectralState::validate(std::move(eigenvalues), std::move(amplitudes));
}

struct Survival {
    double fidelity = 1.0;  // |<psi0|psi_t>|^2
    double distance = 0.0;  // sqrt(1 - F)
};

// F(t) = |sum_k p_k exp(-i lambda_k t)|^2. The infidelity 1 - F is assembled
// from half-angle sines of the centered energies, so D stays accurate at
// small t and under constant shifts of the spectrum.
Survival survival(const SpectralState& state, double t);

// Shorthand for survival(state, t).distance.
double trace_distance_at(const SpectralState& state, double t);

struct MomentSummary {
    double mean = 0.0;            // <H>
    double second_moment = 0.0;   // <H^2>
    double variance = 0.0;        // Delta(H^2)
    double fourth_central = 0.0;  // Delta(H^4) = <(H - <H>)^4>
    double eps_star = 0.0;        // Delta(H^2) / (Delta(H^2) + sqrt(Delta(H^4))), 0 if stationary
    double lipschitz = 0.0;       // sqrt(Delta(H^2))

    bool stationary() const noexcept { return variance <= 0.0; }
};

MomentSummary moments(const SpectralState& state);

using DenseOperator = Eigen::MatrixXcd;

struct CommutatorReport {
    DenseOperator x_h;           // -[H,[H,psi0]] in the eigenbasis
    double norm = 0.0;           // ||X_H||_inf
    double trace_with_state = 0.0;  // tr(X_H psi0) = -2 Delta(H^2)
};

CommutatorReport commutator_operator(const SpectralState& state,
                                     std::size_t dense_limit = kDenseLimit);

}  // namespace reclab
