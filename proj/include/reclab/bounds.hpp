// bounds.hpp: closed-form exit and recurrence bounds and the exit-finiteness
// criterion. Exponential bounds are carried in log10 form because
// (c/eps)^(d-1) leaves double range for d of a few hundred.
#pragma once

#include "reclab/spectral.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace reclab {

// Positive quantity stored as log10.
class LogScaled {
public:
    LogScaled() = default;
    static LogScaled from_value(double v);
    static LogScaled from_log10(double l);

    double log10() const noexcept { return log10_; }
    // Absent when the value does not fit in a double.
    std::optional<double> value() const;
    bool overflow() const { return !value().has_value(); }

    // t <= bound, comparing in log space once the bound overflows.
    bool bounds_above(double t, double slack = 0.0) const;

private:
    LogScaled(double l, double v) : log10_(l), value_(v) {}
    friend LogScaled scaled_power(double, double, double);

    double log10_ = 0.0;
    double value_ = 1.0;  // +inf once out of range
};

// prefactor * (base)^(exponent), in log space.
LogScaled scaled_power(double prefactor, double base, double exponent);

struct QslBounds {
    double mt_lower = 0.0;              // arcsin(eps) / sqrt(Delta(H^2))
    std::optional<double> qsl_upper;   // only for eps < eps*
};

QslBounds qsl_bounds(double epsilon, const MomentSummary& m);

struct RecurrenceBoundInputs {
    double epsilon = 0.0;
    std::size_t dimension = 0;
    double t_exit = 0.0;                     // t_exit(eps), measured or analytic
    std::optional<double> t_exit_double;     // t_exit(2 eps), for the k-th bound
    std::optional<int> k;
    std::optional<MomentSummary> moments;    // for the concrete bound
};

struct RecurrenceBounds {
    LogScaled first;                   // t_exit (4 pi / eps)^(d-1)
    std::optional<LogScaled> kth;      // k t_exit(2 eps) (8 pi / eps)^(d-1)
    std::optional<LogScaled> concrete; // eps / sqrt(2 Delta) (4 pi / eps)^(d-1), eps < eps*/2
    std::vector<std::string> skipped;  // why an optional bound is absent
};

RecurrenceBounds recurrence_bounds(const RecurrenceBoundInputs& in);

struct ReducedBounds {
    LogScaled quarter;      // exponent d_supp(eps^2/4) - 1
    LogScaled improved;  // exponent d_supp(eps/2) - 1
};

ReducedBounds reduced_bound(double epsilon, double t_exit, std::size_t d_supp_quarter,
                            std::size_t d_supp_half);

// n non-interacting copies of a d_single-level system.
LogScaled free_bound(double epsilon, double t_exit, std::size_t d_single, std::size_t n);

struct UnitaryBounds {
    double exit_upper = 0.0;  // pi eps / (lambda_max - lambda_min)
    LogScaled rec_upper;      // exit_upper (8 pi / eps)^(d-1)
};

UnitaryBounds unitary_bounds(double epsilon, double lambda_max, double lambda_min,
                             std::size_t d);

struct FinitenessVerdict {
    bool finite = true;
    double infimum_fidelity = 0.0;  // M = max(2 p_max - 1, 0)^2
    double threshold = 1.0;         // 1 - eps^2
    double p_max = 0.0;
    // Set unconditionally: the "exits" direction relies on rational
    // independence of the spectrum, which is not checked. "Never exits" is
    // exact regardless.
    bool assumes_rational_independence = true;
};

FinitenessVerdict finiteness(const SpectralState& state, double epsilon);

// Everything for one (state, eps) instance. Times that the bounds need as
// inputs are supplied by the caller; nothing is substituted silently.
struct BoundContext {
    std::optional<double> t_exit;          // measured t_exit(eps)
    std::optional<double> t_exit_double;   // measured t_exit(2 eps)
    std::optional<int> k;
    std::optional<std::size_t> particles;  // n, for the free-evolution bound
    std::optional<std::size_t> single_dim; // d of one particle
};

struct BoundReport {
    double epsilon = 0.0;
    double eps_star = 0.0;
    double mt_lower = 0.0;
    std::optional<double> qsl_upper;
    std::optional<LogScaled> moment_rec_upper;
    std::optional<LogScaled> kth_rec_upper;
    std::optional<LogScaled> concrete_rec_upper;
    std::optional<LogScaled> reduced_rec_upper;
    std::optional<LogScaled> reduced_improved_upper;
    std::size_t d_supp_quarter = 0;
    std::size_t d_supp_half = 0;
    std::optional<LogScaled> free_rec_upper;
    std::optional<double> unitary_exit_upper;
    std::optional<LogScaled> unitary_rec_upper;
    FinitenessVerdict finite;
    std::vector<std::string> notes;
};

BoundReport evaluate_bounds(const SpectralState& state, double epsilon,
                            const BoundContext& ctx);

}  // namespace reclab
