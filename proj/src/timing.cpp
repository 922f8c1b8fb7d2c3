#include "reclab/timing.hpp"

#include "reclab/bounds.hpp"
#include "reclab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace reclab {

namespace {

constexpr int kMaxBisections = 200;

void validate_query(const CrossingQuery& q) {
    if (!(q.epsilon > 0.0 && q.epsilon < 1.0)) {
        throw PreconditionError("query: epsilon must lie in (0, 1)");
    }
    if (!(q.dt_min > 0.0)) throw PreconditionError("query: dt_min must be > 0");
    if (!(q.refine_tol > 0.0)) throw PreconditionError("query: refine_tol must be > 0");
    if (q.t_max && !(q.dt_min <= *q.t_max)) {
        throw PreconditionError("query: need dt_min <= t_max");
    }
    if (q.k < 0) throw PreconditionError("query: k must be >= 0");
}

enum class Direction { Leave, Return };

class CrossingSearch {
public:
    CrossingSearch(const SpectralState& state, const CrossingQuery& q, double lipschitz)
        : state_(state), q_(q), lipschitz_(lipschitz) {}

    double distance(double t) {
        ++evaluations_;
        return trace_distance_at(state_, t);
    }

    bool reached(Direction dir, double d) const {
        return dir == Direction::Leave ? d >= q_.epsilon : d <= q_.epsilon;
    }

    // First crossing after t_from, whose distance d_from has not reached the
    // target. `first_step` lets the exit search start from the speed-limit floor.
    std::optional<double> march(Direction dir, double t_from, double d_from, double horizon,
                                double first_step = 0.0) {
        double t = t_from;
        double d = d_from;
        bool first = true;
        while (t < horizon) {
            const double margin = dir == Direction::Leave ? q_.epsilon - d : d - q_.epsilon;
            double step = std::max(q_.dt_min, margin / lipschitz_);
            if (first) step = std::max(step, first_step);
            first = false;
            const double t_next = std::min(t + step, horizon);
            const double d_next = distance(t_next);
            if (reached(dir, d_next)) return bisect(dir, t, t_next);
            t = t_next;
            d = d_next;
        }
        return std::nullopt;
    }

    std::uint64_t evaluations() const noexcept { return evaluations_; }

private:
    // Invariant: target not reached at lo, reached at hi. Ties count as
    // reached, which moves the answer toward the earlier time.
    double bisect(Direction dir, double lo, double hi) {
        for (int i = 0; i < kMaxBisections && hi - lo > q_.refine_tol; ++i) {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid <= lo || mid >= hi) break;
            if (reached(dir, distance(mid))) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    }

    const SpectralState& state_;
    const CrossingQuery& q_;
    double lipschitz_;
    std::uint64_t evaluations_ = 0;
};

double default_exit_horizon(double lipschitz) { return 1e9 / lipschitz; }

}  // namespace

CrossingQuery CrossingQuery::defaults(const SpectralState& state, double epsilon, int k) {
    CrossingQuery q;
    q.epsilon = epsilon;
    q.k = k;
    const double lipschitz = moments(state).lipschitz;
    if (lipschitz > 0.0) {
        q.dt_min = 1e-6 / lipschitz;
        q.refine_tol = 1e-10 / lipschitz;
    }
    return q;
}

std::string_view to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Exited: return "Exited";
        case SearchStatus::NeverExitsAnalytic: return "NeverExitsAnalytic";
        case SearchStatus::HorizonExhausted: return "HorizonExhausted";
    }
    return "HorizonExhausted";
}

std::optional<SearchStatus> search_status_from_string(std::string_view s) {
    for (auto st : {SearchStatus::Exited, SearchStatus::NeverExitsAnalytic,
                    SearchStatus::HorizonExhausted}) {
        if (to_string(st) == s) return st;
    }
    return std::nullopt;
}

TimingCertificate find_exit(const SpectralState& state, const CrossingQuery& q) {
    validate_query(q);
    const MomentSummary m = moments(state);
    TimingCertificate cert;
    cert.miss_tol = m.lipschitz * q.dt_min;

    // Zero variance means every populated level has the same energy, so
    // F(t) = 1 identically. Otherwise F(t) >= M for all t, and M > 1 - eps^2
    // rules out an exit whether or not the spectrum is rationally independent.
    if (m.stationary() || !finiteness(state, q.epsilon).finite) {
        cert.status = SearchStatus::NeverExitsAnalytic;
        cert.horizon = 0.0;
        return cert;
    }

    cert.horizon = q.t_max.value_or(default_exit_horizon(m.lipschitz));
    CrossingSearch search(state, q, m.lipschitz);
    // Mandelstam-Tamm: D(t) <= sin(L t), so nothing crosses before asin(eps)/L.
    const double floor = std::asin(q.epsilon) / m.lipschitz;
    const auto t = search.march(Direction::Leave, 0.0, 0.0, cert.horizon, floor);
    cert.evaluations = search.evaluations();
    if (t) {
        cert.t_exit = *t;
        cert.status = SearchStatus::Exited;
    } else {
        cert.status = SearchStatus::HorizonExhausted;
    }
    return cert;
}

TimingCertificate find_recurrences(const SpectralState& state, const CrossingQuery& q) {
    validate_query(q);
    if (q.k < 1) throw PreconditionError("find_recurrences: k must be >= 1");

    CrossingQuery exit_query = q;
    TimingCertificate cert = find_exit(state, exit_query);
    if (cert.status != SearchStatus::Exited) return cert;

    const MomentSummary m = moments(state);
    double horizon = default_exit_horizon(m.lipschitz);
    if (q.t_max) {
        horizon = *q.t_max;
    } else if (state.dimension() >= 2) {
        // Heuristic horizon only; the bound is never used as proof of return.
        RecurrenceBoundInputs in;
        in.epsilon = q.epsilon;
        in.dimension = state.dimension();
        in.t_exit = *cert.t_exit;
        const LogScaled first = recurrence_bounds(in).first;
        if (auto v = first.value()) horizon = std::min(horizon, 10.0 * *v);
    }
    cert.horizon = horizon;

    CrossingSearch search(state, q, m.lipschitz);
    double t = *cert.t_exit;
    double d = search.distance(t);
    for (int j = 0; j < q.k; ++j) {
        const auto back = search.march(Direction::Return, t, d, horizon);
        if (!back) {
            cert.status = SearchStatus::HorizonExhausted;
            break;
        }
        cert.recurrences.push_back(*back);
        if (j + 1 == q.k) break;
        const auto out = search.march(Direction::Leave, *back, search.distance(*back), horizon);
        if (!out) {
            cert.status = SearchStatus::HorizonExhausted;
            break;
        }
        t = *out;
        d = search.distance(t);
    }
    cert.evaluations += search.evaluations();
    return cert;
}

}  // namespace reclab
