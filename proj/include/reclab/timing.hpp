// timing.hpp: certified search for exit and recurrence times.
//
// D(t) = D_tr(psi0, psi_t) is Lipschitz with constant L = sqrt(Delta(H^2)).
// From a point with D(t) < eps no crossing can happen within (eps - D)/L, so
// the march takes that step, floored at dt_min. A crossing hidden inside a
// floored step overshoots eps by at most miss_tol = L * dt_min. Brackets are
// refined by bisection to refine_tol.
#pragma once

#include "reclab/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace reclab {

struct CrossingQuery {
    double epsilon = 0.1;
    double dt_min = 1e-6;
    std::optional<double> t_max;  // absent: min(10 * first recurrence bound, 1e9 / L)
    double refine_tol = 1e-10;
    int k = 0;

    // dt_min = 1e-6 / L, refine_tol = 1e-10 / L; t_max left to the solver.
    static CrossingQuery defaults(const SpectralState& state, double epsilon, int k = 0);
};

enum class SearchStatus { Exited, NeverExitsAnalytic, HorizonExhausted };

std::string_view to_string(SearchStatus s);
std::optional<SearchStatus> search_status_from_string(std::string_view s);

struct TimingCertificate {
    std::optional<double> t_exit;
    std::vector<double> recurrences;
    double miss_tol = 0.0;
    SearchStatus status = SearchStatus::HorizonExhausted;
    std::uint64_t evaluations = 0;
    double horizon = 0.0;
};

TimingCertificate find_exit(const SpectralState& state, const CrossingQuery& q);

// Exit, then k cycles of (return within eps, leave again). Requires k >= 1.
// If the horizon is reached first, the recurrences found so far are returned
// with status HorizonExhausted.
TimingCertificate find_recurrences(const SpectralState& state, const CrossingQuery& q);

}  // namespace reclab
