#include "reclab/bounds.hpp"

#include "reclab/errors.hpp"
#include "reclab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace reclab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_epsilon(double epsilon, const char* who) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw PreconditionError(std::string(who) + ": epsilon must lie in (0, 1)");
    }
}

}  // namespace

LogScaled LogScaled::from_value(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw PreconditionError("LogScaled: value must be positive and finite");
    }
    return LogScaled(std::log10(v), v);
}

LogScaled LogScaled::from_log10(double l) {
    return LogScaled(l, std::pow(10.0, l));
}

std::optional<double> LogScaled::value() const {
    if (std::isfinite(value_)) return value_;
    return std::nullopt;
}

bool LogScaled::bounds_above(double t, double slack) const {
    if (auto v = value()) return t <= *v + slack;
    return t <= 0.0 || std::log10(t) <= log10_;
}

LogScaled scaled_power(double prefactor, double base, double exponent) {
    if (!(prefactor > 0.0) || !(base > 0.0)) {
        throw PreconditionError("scaled_power: prefactor and base must be positive");
    }
    const double l = std::log10(prefactor) + exponent * std::log10(base);
    double v = prefactor * std::pow(base, exponent);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    return LogScaled(l, v);
}

QslBounds qsl_bounds(double epsilon, const MomentSummary& m) {
    require_epsilon(epsilon, "qsl_bounds");
    if (!(m.variance > 0.0)) throw PreconditionError("qsl_bounds: zero energy variance");
    QslBounds out;
    const double spread = std::sqrt(m.variance);
    out.mt_lower = std::asin(epsilon) / spread;
    if (epsilon < m.eps_star) {
        out.qsl_upper = (epsilon / spread) / std::sqrt(1.0 - epsilon / m.eps_star);
    }
    return out;
}

RecurrenceBounds recurrence_bounds(const RecurrenceBoundInputs& in) {
    require_epsilon(in.epsilon, "recurrence_bounds");
    if (in.dimension < 2) throw PreconditionError("recurrence_bounds: need d >= 2");
    if (!(in.t_exit > 0.0)) throw PreconditionError("recurrence_bounds: t_exit must be > 0");

    const double eps = in.epsilon;
    const double exponent = static_cast<double>(in.dimension - 1);
    RecurrenceBounds out;
    out.first = scaled_power(in.t_exit, 4.0 * kPi / eps, exponent);

    if (in.k) {
        if (*in.k < 1) {
            out.skipped.emplace_back("kth: k must be >= 1");
        } else if (!(2.0 * eps < 1.0)) {
            out.skipped.emplace_back("kth: requires 2 eps < 1");
        } else if (!in.t_exit_double || !(*in.t_exit_double > 0.0)) {
            out.skipped.emplace_back("kth: t_exit(2 eps) not supplied");
        } else {
            out.kth = scaled_power(static_cast<double>(*in.k) * *in.t_exit_double,
                                   8.0 * kPi / eps, exponent);
        }
    }
    if (in.moments) {
        const auto& m = *in.moments;
        if (!(m.variance > 0.0)) {
            out.skipped.emplace_back("concrete: zero energy variance");
        } else if (!(eps < 0.5 * m.eps_star)) {
            out.skipped.emplace_back("concrete: requires eps < eps*/2");
        } else {
            out.concrete = scaled_power(eps / std::sqrt(2.0 * m.variance), 4.0 * kPi / eps,
                                        exponent);
        }
    }
    return out;
}

ReducedBounds reduced_bound(double epsilon, double t_exit, std::size_t d_supp_quarter,
                            std::size_t d_supp_half) {
    require_epsilon(epsilon, "reduced_bound");
    if (d_supp_quarter < 1 || d_supp_half < 1) {
        throw PreconditionError("reduced_bound: supports must be >= 1");
    }
    if (!(t_exit > 0.0)) throw PreconditionError("reduced_bound: t_exit must be > 0");
    const double base = 8.0 * kPi / epsilon;
    return ReducedBounds{
        scaled_power(t_exit, base, static_cast<double>(d_supp_quarter - 1)),
        scaled_power(t_exit, base, static_cast<double>(d_supp_half - 1)),
    };
}

LogScaled free_bound(double epsilon, double t_exit, std::size_t d_single, std::size_t n) {
    require_epsilon(epsilon, "free_bound");
    if (n < 1) throw PreconditionError("free_bound: need n >= 1");
    if (d_single < 2) throw PreconditionError("free_bound: need d_single >= 2");
    if (!(t_exit > 0.0)) throw PreconditionError("free_bound: t_exit must be > 0");
    return scaled_power(t_exit, 4.0 * kPi * static_cast<double>(n) / epsilon,
                        static_cast<double>(d_single - 1));
}

UnitaryBounds unitary_bounds(double epsilon, double lambda_max, double lambda_min,
                             std::size_t d) {
    require_epsilon(epsilon, "unitary_bounds");
    if (!(lambda_max > lambda_min)) throw PreconditionError("unitary_bounds: flat spectrum");
    if (d < 1) throw PreconditionError("unitary_bounds: need d >= 1");
    UnitaryBounds out;
    out.exit_upper = kPi * epsilon / (lambda_max - lambda_min);
    out.rec_upper = scaled_power(out.exit_upper, 8.0 * kPi / epsilon, static_cast<double>(d - 1));
    return out;
}

FinitenessVerdict finiteness(const SpectralState& state, double epsilon) {
    require_epsilon(epsilon, "finiteness");
    FinitenessVerdict out;
    const auto p = state.probabilities();
    const auto top = std::max_element(p.begin(), p.end());
    out.p_max = *top;
    // p_max minus the rest rather than 2 p_max - 1, so balanced states give 0 exactly.
    double rest = 0.0;
    for (auto it = p.begin(); it != p.end(); ++it) {
        if (it != top) rest += *it;
    }
    const double gap = std::max(out.p_max - rest, 0.0);
    out.infimum_fidelity = gap * gap;
    out.threshold = 1.0 - epsilon * epsilon;
    out.finite = out.threshold >= out.infimum_fidelity;
    return out;
}

BoundReport evaluate_bounds(const SpectralState& state, double epsilon, const BoundContext& ctx) {
    require_epsilon(epsilon, "evaluate_bounds");
    const MomentSummary m = moments(state);
    const std::size_t d = state.dimension();

    BoundReport r;
    r.epsilon = epsilon;
    r.eps_star = m.eps_star;
    r.finite = finiteness(state, epsilon);
    r.d_supp_quarter = effective_support(state, epsilon * epsilon / 4.0).size();
    r.d_supp_half = effective_support(state, epsilon / 2.0).size();

    if (m.variance > 0.0) {
        const QslBounds q = qsl_bounds(epsilon, m);
        r.mt_lower = q.mt_lower;
        r.qsl_upper = q.qsl_upper;
        if (!q.qsl_upper) r.notes.emplace_back("qsl_upper: requires eps < eps*");
    } else {
        r.mt_lower = std::numeric_limits<double>::infinity();
        r.notes.emplace_back("stationary state: exit never occurs");
    }

    if (ctx.t_exit && *ctx.t_exit > 0.0) {
        if (d >= 2) {
            RecurrenceBoundInputs in;
            in.epsilon = epsilon;
            in.dimension = d;
            in.t_exit = *ctx.t_exit;
            in.t_exit_double = ctx.t_exit_double;
            in.k = ctx.k;
            in.moments = m;
            RecurrenceBounds rb = recurrence_bounds(in);
            r.moment_rec_upper = rb.first;
            r.kth_rec_upper = rb.kth;
            r.concrete_rec_upper = rb.concrete;
            r.notes.insert(r.notes.end(), rb.skipped.begin(), rb.skipped.end());
        }
        const ReducedBounds red =
            reduced_bound(epsilon, *ctx.t_exit, r.d_supp_quarter, r.d_supp_half);
        r.reduced_rec_upper = red.quarter;
        r.reduced_improved_upper = red.improved;
        if (ctx.particles && ctx.single_dim) {
            r.free_rec_upper = free_bound(epsilon, *ctx.t_exit, *ctx.single_dim, *ctx.particles);
        }
    } else {
        r.notes.emplace_back("recurrence bounds: no measured t_exit supplied");
    }

    const auto lam = state.eigenvalues();
    const auto [lo, hi] = std::minmax_element(lam.begin(), lam.end());
    if (*hi > *lo) {
        const UnitaryBounds u = unitary_bounds(epsilon, *hi, *lo, d);
        r.unitary_exit_upper = u.exit_upper;
        r.unitary_rec_upper = u.rec_upper;
    } else {
        r.notes.emplace_back("unitary bounds: flat spectrum");
    }
    return r;
}

}  // namespace reclab
