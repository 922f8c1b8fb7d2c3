#include "reclab/ensembles.hpp"

#include "reclab/errors.hpp"
#include "reclab/parallel.hpp"
#include "reclab/rng.hpp"
#include "reclab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace reclab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMonotoneGrid = 1000;
constexpr std::uint64_t kProximityChunk = 1024;

std::optional<double> nearest_rank(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::nullopt;
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    const double v = sorted[rank - 1];
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

Quantiles quantiles(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return Quantiles{nearest_rank(values, 0.10), nearest_rank(values, 0.50),
                     nearest_rank(values, 0.90)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// log t_rec per trial; censored trials enter at log(horizon), a lower bound.
std::vector<double> log_recurrence_samples(const EnsembleSummary& s) {
    std::vector<double> out;
    for (const auto& r : s.records) {
        if (r.t_rec) {
            out.push_back(std::log(*r.t_rec));
        } else if (r.rec_attempted && r.rec_horizon > 0.0) {
            out.push_back(std::log(r.rec_horizon));
        }
    }
    return out;
}

bool distance_monotone(const SpectralState& state, double t_end) {
    double prev = 0.0;
    for (std::size_t i = 1; i <= kMonotoneGrid; ++i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(kMonotoneGrid);
        const double d = trace_distance_at(state, t);
        if (d < prev - 1e-12) return false;
        prev = d;
    }
    return true;
}

}  // namespace

void EnsembleConfig::validate() const {
    if (d < 1) throw PreconditionError("ensemble: d must be >= 1");
    if (trials < 1) throw PreconditionError("ensemble: trials must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw PreconditionError("ensemble: epsilon must lie in (0, 1)");
    }
    if (family == StateFamily::Eta) {
        if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("ensemble: eta must lie in (0, 1)");
        if (d < 2) throw PreconditionError("ensemble: eta family needs d >= 2");
    }
    if (recurrence == RecurrencePolicy::Fixed && !(rec_horizon > 0.0)) {
        throw PreconditionError("ensemble: fixed recurrence horizon must be > 0");
    }
}

void parse_family(const std::string& text, EnsembleConfig& cfg) {
    if (text == "uniform") {
        cfg.family = StateFamily::Uniform;
        return;
    }
    if (text.rfind("eta:", 0) == 0) {
        try {
            std::size_t used = 0;
            const std::string num = text.substr(4);
            cfg.eta = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw PreconditionError("family: cannot parse eta in '" + text + "'");
        }
        cfg.family = StateFamily::Eta;
        return;
    }
    throw PreconditionError("family: expected 'uniform' or 'eta:<value>', got '" + text + "'");
}

std::string family_label(const EnsembleConfig& cfg) {
    if (cfg.family == StateFamily::Uniform) return "uniform";
    char buf[64];
    std::snprintf(buf, sizeof buf, "eta:%.9g", cfg.eta);
    return buf;
}

WindowFlags moment_windows(const SpectralState& state, const MomentSummary& m) {
    double fourth = 0.0;
    const auto p = state.probabilities();
    const auto lam = state.eigenvalues();
    for (std::size_t k = 0; k < p.size(); ++k) fourth += p[k] * std::pow(lam[k], 4);
    WindowFlags w;
    w.mean = std::abs(m.mean) < 0.1;
    w.second_moment = m.second_moment > 0.2 && m.second_moment < 0.5;
    w.variance = m.variance > 0.1 && m.variance < 0.5;
    w.fourth_moment = std::abs(fourth - 0.2) < 0.1;
    w.eps_star = m.eps_star > 1.0 / 9.0;
    return w;
}

SpectralState draw_trial_state(const EnsembleConfig& cfg, std::uint64_t trial_id,
                               std::uint64_t* key) {
    CounterRng rng(cfg.seed, trial_id);
    if (key) *key = rng.key();
    std::vector<double> lam(cfg.d);
    for (auto& x : lam) x = rng.uniform(-1.0, 1.0);
    std::vector<double> p(cfg.d, 1.0 / static_cast<double>(cfg.d));
    if (cfg.family == StateFamily::Eta) {
        const double rest = (1.0 - cfg.eta) / static_cast<double>(cfg.d - 1);
        std::fill(p.begin(), p.end(), rest);
        p[rng.below(cfg.d)] = cfg.eta;
    }
    return SpectralState::from_probabilities(std::move(lam), p);
}

TrialRecord sample_trial(const EnsembleConfig& cfg, std::uint64_t trial_id) {
    cfg.validate();
    TrialRecord rec;
    rec.trial_id = trial_id;
    const SpectralState state = draw_trial_state(cfg, trial_id, &rec.spectrum_seed);
    rec.moments = moments(state);
    for (std::size_t k = 0; k < state.dimension(); ++k) {
        rec.fourth_raw += state.probabilities()[k] * std::pow(state.eigenvalues()[k], 4);
    }
    rec.windows = moment_windows(state, rec.moments);
    rec.d_eff = effective_dimension(state);
    rec.d_supp_quarter = effective_support(state, cfg.epsilon * cfg.epsilon / 4.0).size();

    if (rec.moments.stationary()) {
        rec.exit_status = SearchStatus::NeverExitsAnalytic;
        return rec;
    }
    const QslBounds q = qsl_bounds(cfg.epsilon, rec.moments);
    rec.mt_lower = q.mt_lower;
    rec.qsl_upper = q.qsl_upper;

    CrossingQuery query = CrossingQuery::defaults(state, cfg.epsilon, 1);
    TimingCertificate cert;
    if (cfg.recurrence == RecurrencePolicy::None) {
        cert = find_exit(state, query);
    } else {
        double horizon = 1e8 / rec.moments.lipschitz;
        if (cfg.recurrence == RecurrencePolicy::Fixed) {
            horizon = cfg.rec_horizon;
        } else {
            const TimingCertificate exit_only = find_exit(state, query);
            if (exit_only.t_exit && state.dimension() >= 2) {
                RecurrenceBoundInputs in;
                in.epsilon = cfg.epsilon;
                in.dimension = state.dimension();
                in.t_exit = *exit_only.t_exit;
                if (auto v = recurrence_bounds(in).first.value()) horizon = std::min(horizon, *v);
            }
        }
        query.t_max = std::max(horizon, query.dt_min);
        cert = find_recurrences(state, query);
        rec.rec_attempted = cert.status != SearchStatus::NeverExitsAnalytic && cert.t_exit;
        rec.rec_horizon = cert.horizon;
        if (!cert.recurrences.empty()) rec.t_rec = cert.recurrences.front();
    }
    rec.exit_status = cert.t_exit ? SearchStatus::Exited : cert.status;
    rec.t_exit = cert.t_exit;
    rec.miss_tol = cert.miss_tol;
    if (rec.t_exit) {
        const double e = cfg.epsilon;
        rec.exit_window = *rec.t_exit > std::sqrt(2.0) * e && *rec.t_exit < 2.0 * std::sqrt(5.0) * e;
    }

    if (cfg.check_monotone && rec.moments.eps_star > 0.0) {
        CrossingQuery star = CrossingQuery::defaults(state, rec.moments.eps_star);
        star.t_max = 1e4 / rec.moments.lipschitz;
        const TimingCertificate c = find_exit(state, star);
        rec.monotone_ok = c.t_exit && distance_monotone(state, *c.t_exit);
    }
    return rec;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw PreconditionError("least_squares_slope: need >= 2 paired points");
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw PreconditionError("least_squares_slope: x values are all equal");
    return sxy / sxx;
}

EnsembleSummary run_ensemble(const EnsembleConfig& cfg) {
    cfg.validate();
    EnsembleSummary s;
    s.config = cfg;
    s.records.resize(cfg.trials);
    parallel_for(cfg.trials, [&](std::size_t i) { s.records[i] = sample_trial(cfg, i); });

    const double n = static_cast<double>(cfg.trials);
    std::vector<double> exits;
    std::vector<double> recs;
    std::uint64_t windows = 0, exit_windows = 0, joint = 0, monotone = 0;
    for (const auto& r : s.records) {
        windows += r.windows.all();
        exit_windows += r.exit_window;
        joint += r.windows.all() && r.exit_window;
        monotone += r.monotone_ok;
        if (r.t_exit) {
            ++s.exited;
            exits.push_back(*r.t_exit);
            const double slack = r.miss_tol;
            const bool below = *r.t_exit + slack < r.mt_lower;
            const bool above = r.qsl_upper && *r.t_exit > *r.qsl_upper + slack;
            if (cfg.epsilon < r.moments.eps_star && (below || above)) ++s.sandwich_violations;
        }
        if (r.rec_attempted) {
            recs.push_back(r.t_rec.value_or(std::numeric_limits<double>::infinity()));
            if (r.t_rec) {
                ++s.rec_found;
            } else {
                ++s.rec_censored;
            }
        }
    }
    s.window_fraction = static_cast<double>(windows) / n;
    s.exit_window_fraction = static_cast<double>(exit_windows) / n;
    s.joint_fraction = static_cast<double>(joint) / n;
    s.monotone_fraction = static_cast<double>(monotone) / n;
    s.t_exit = quantiles(exits);
    s.t_rec = quantiles(recs);
    if (const auto logs = log_recurrence_samples(s); !logs.empty()) s.median_log_t_rec = median(logs);
    if (cfg.t_probe) {
        s.proximity = proximity_probability(cfg.d, cfg.epsilon, *cfg.t_probe, cfg.trials, cfg.seed);
    }
    return s;
}

SweepSummary run_sweep(const EnsembleConfig& base, std::span<const std::size_t> dims,
                       std::size_t bootstrap) {
    if (dims.size() < 2) throw PreconditionError("sweep: need at least two dimensions");
    if (base.recurrence == RecurrencePolicy::None) {
        throw PreconditionError("sweep: scaling fit needs recurrence times");
    }
    SweepSummary out;
    std::vector<double> xs;
    std::vector<std::vector<double>> samples;
    for (std::size_t d : dims) {
        EnsembleConfig cfg = base;
        cfg.d = d;
        out.runs.push_back(run_ensemble(cfg));
        auto logs = log_recurrence_samples(out.runs.back());
        if (logs.empty()) throw PreconditionError("sweep: no recurrence data at d = " + std::to_string(d));
        out.median_log_t_rec.push_back(median(logs));
        samples.push_back(std::move(logs));
        xs.push_back(static_cast<double>(d));
    }
    out.slope = least_squares_slope(xs, out.median_log_t_rec);

    std::vector<double> slopes;
    slopes.reserve(bootstrap);
    std::vector<double> medians(dims.size());
    for (std::size_t b = 0; b < bootstrap; ++b) {
        CounterRng rng(base.seed ^ 0xB0075712A9ull, b);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            std::vector<double> draw(samples[i].size());
            for (auto& v : draw) v = samples[i][rng.below(samples[i].size())];
            medians[i] = median(std::move(draw));
        }
        slopes.push_back(least_squares_slope(xs, medians));
    }
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        out.ci_low = *nearest_rank(slopes, 0.025);
        out.ci_high = *nearest_rank(slopes, 0.975);
    } else {
        out.ci_low = out.ci_high = out.slope;
    }
    out.positive = out.ci_low > 0.0;
    return out;
}

ProximityEstimate proximity_probability(std::size_t d, double epsilon, double t,
                                        std::uint64_t trials, std::uint64_t seed) {
    const double t_floor = std::sqrt(2.0) / 9.0;
    if (!(t > t_floor)) throw PreconditionError("proximity: need t > sqrt(2)/9");
    if (trials < 1) throw PreconditionError("proximity: trials must be >= 1");
    if (d < 1) throw PreconditionError("proximity: d must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw PreconditionError("proximity: epsilon must lie in (0, 1)");
    }

    EnsembleConfig cfg;
    cfg.d = d;
    cfg.seed = seed;
    const std::uint64_t chunks = (trials + kProximityChunk - 1) / kProximityChunk;
    std::vector<std::uint64_t> chunk_hits(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
        const std::uint64_t end = std::min(trials, (c + 1) * kProximityChunk);
        for (std::uint64_t i = c * kProximityChunk; i < end; ++i) {
            const SpectralState s = draw_trial_state(cfg, i);
            chunk_hits[c] += trace_distance_at(s, t) < epsilon;
        }
    });

    ProximityEstimate out;
    out.trials = trials;
    out.hits = std::accumulate(chunk_hits.begin(), chunk_hits.end(), std::uint64_t{0});
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(out.hits) / n;
    out.estimate = p;
    const double z = 1.959963984540054;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    out.ci_low = std::max(0.0, centre - half);
    out.ci_high = std::min(1.0, centre + half);

    const double c_const = 50.0 * (1.0 + 72.0 / std::sqrt(2.0));
    out.bound = scaled_power(8.0 * kPi / (epsilon * epsilon), c_const * epsilon,
                             static_cast<double>(d));
    out.vacuous = out.bound.log10() >= 0.0;
    return out;
}

}  // namespace reclab
