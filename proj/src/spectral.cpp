#include "reclab/spectral.hpp"

#include "reclab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace reclab {

SpectralState SpectralState::validate(std::vector<double> eigenvalues,
                                      std::vector<Complex> amplitudes) {
    if (eigenvalues.empty()) {
        throw PreconditionError("state: eigenvalue list is empty");
    }
    if (eigenvalues.size() != amplitudes.size()) {
        throw PreconditionError("state: " + std::to_string(eigenvalues.size()) +
                                " eigenvalues but " + std::to_string(amplitudes.size()) +
                                " amplitudes");
    }
    double norm2 = 0.0;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (!std::isfinite(eigenvalues[k]) || !std::isfinite(amplitudes[k].real()) ||
            !std::isfinite(amplitudes[k].imag())) {
            throw PreconditionError("state: non-finite entry at index " + std::to_string(k));
        }
        norm2 += std::norm(amplitudes[k]);
    }
    if (!(norm2 >= 1.0 - kNormBand && norm2 <= 1.0 + kNormBand)) {
        throw PreconditionError("state: squared norm " + std::to_string(norm2) +
                                " outside [1-1e-6, 1+1e-6]");
    }

    SpectralState s;
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : amplitudes) a *= scale;
    s.probabilities_.resize(amplitudes.size());
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        s.probabilities_[k] = std::norm(amplitudes[k]);
    }

    // Mean relative to the first populated level: exact zero spread when all
    // populated levels coincide.
    std::size_t ref = 0;
    while (ref < amplitudes.size() && s.probabilities_[ref] == 0.0) ++ref;
    const double lambda_ref = eigenvalues[ref];
    double offset = 0.0;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        offset += s.probabilities_[k] * (eigenvalues[k] - lambda_ref);
    }
    s.mean_ = lambda_ref + offset;
    s.centered_.resize(eigenvalues.size());
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        s.centered_[k] = (eigenvalues[k] - lambda_ref) - offset;
    }

    s.eigenvalues_ = std::move(eigenvalues);
    s.amplitudes_ = std::move(amplitudes);
    return s;
}

SpectralState SpectralState::from_probabilities(std::vector<double> eigenvalues,
                                                std::span<const double> probabilities) {
    std::vector<Complex> amps;
    amps.reserve(probabilities.size());
    for (double p : probabilities) {
        if (!(p >= 0.0)) throw PreconditionError("state: negative or NaN probability");
        amps.emplace_back(std::sqrt(p), 0.0);
    }
    return validate(std::move(eigenvalues), std::move(amps));
}

Survival survival(const SpectralState& state, double t) {
    // z = sum p_k e^{-i w_k t} = (1 - a) - i b with w = centered energies,
    // a = sum p_k (1 - cos w_k t) = sum 2 p_k sin^2(w_k t / 2), b = sum p_k sin(w_k t).
    // 1 - |z|^2 = a (2 - a) - b^2.
    const auto p = state.probabilities();
    const auto w = state.centered_energies();
    double a = 0.0;
    double b = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double half = 0.5 * w[k] * t;
        const double s = std::sin(half);
        const double c = std::cos(half);
        a += 2.0 * p[k] * s * s;
        b += 2.0 * p[k] * s * c;
    }
    double infidelity = a * (2.0 - a) - b * b;
    infidelity = std::clamp(infidelity, 0.0, 1.0);
    return Survival{1.0 - infidelity, std::sqrt(infidelity)};
}

double trace_distance_at(const SpectralState& state, double t) {
    return survival(state, t).distance;
}

MomentSummary moments(const SpectralState& state) {
    const auto p = state.probabilities();
    const auto lam = state.eigenvalues();
    const auto c = state.centered_energies();
    MomentSummary m;
    m.mean = state.mean_energy();
    for (std::size_t k = 0; k < p.size(); ++k) {
        m.second_moment += p[k] * lam[k] * lam[k];
        const double c2 = c[k] * c[k];
        m.variance += p[k] * c2;
        m.fourth_central += p[k] * c2 * c2;
    }
    if (m.variance > 0.0) {
        m.eps_star = m.variance / (m.variance + std::sqrt(m.fourth_central));
        m.lipschitz = std::sqrt(m.variance);
    } else {
        m.variance = 0.0;
        m.fourth_central = 0.0;
    }
    return m;
}

CommutatorReport commutator_operator(const SpectralState& state, std::size_t dense_limit) {
    const std::size_t d = state.dimension();
    if (d > dense_limit) {
        throw PreconditionError("commutator_operator: dimension " + std::to_string(d) +
                                " exceeds dense limit " + std::to_string(dense_limit));
    }
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::VectorXcd psi(n);
    Eigen::VectorXcd lam(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        psi(k) = state.amplitudes()[static_cast<std::size_t>(k)];
        // commutators ignore a constant shift of H, and centering keeps X_H = 0
        // exact for stationary states
        lam(k) = state.centered_energies()[static_cast<std::size_t>(k)];
    }
    const DenseOperator rho = psi * psi.adjoint();
    const DenseOperator h = lam.asDiagonal();
    const DenseOperator h2 = h * h;

    CommutatorReport out;
    out.x_h = -(h2 * rho - 2.0 * h * rho * h + rho * h2);
    out.trace_with_state = (out.x_h * rho).trace().real();

    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(out.x_h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("commutator_operator: eigendecomposition failed");
    }
    out.norm = solver.eigenvalues().cwiseAbs().maxCoeff();
    return out;
}

}  // namespace reclab
