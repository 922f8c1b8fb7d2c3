#include "reclab/cli.hpp"

#include "reclab/bounds.hpp"
#include "reclab/ensembles.hpp"
#include "reclab/errors.hpp"
#include "reclab/geometry.hpp"
#include "reclab/io.hpp"
#include "reclab/structure.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

namespace reclab {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitHorizon = 3;

const char* const kTrialColumns =
    "Ensemble CSV columns (one row per trial):\n"
    "  d               Hilbert-space dimension\n"
    "  trial_id        trial index; with the seed it fixes the random draw\n"
    "  spectrum_seed   key of the trial's random stream\n"
    "  mean            <H>\n"
    "  second_moment   <H^2>\n"
    "  variance        Delta(H^2)\n"
    "  fourth_raw      <H^4>\n"
    "  eps_star        Delta(H^2) / (Delta(H^2) + sqrt(Delta(H^4)))\n"
    "  windows_ok      1 if every moment window holds\n"
    "  exit_status     Exited | NeverExitsAnalytic | HorizonExhausted\n"
    "  t_exit          certified exit time (empty if none)\n"
    "  mt_lower        arcsin(eps) / sqrt(Delta(H^2))\n"
    "  qsl_upper      upper exit bound, empty unless eps < eps_star\n"
    "  miss_tol        largest overshoot a floored step can hide\n"
    "  exit_window     1 if sqrt(2) eps < t_exit < 2 sqrt(5) eps\n"
    "  t_rec           first recurrence time (empty if none found)\n"
    "  rec_censored    1 if the search hit rec_horizon first\n"
    "  rec_horizon     recurrence search horizon (empty if not searched)\n"
    "  monotone_ok     1 if D(t) is non-decreasing up to t_exit(eps_star)\n"
    "  d_eff           1 / sum p_k^2\n"
    "  d_supp_quarter  effective support size at delta = eps^2 / 4\n";

using Table = std::vector<std::pair<std::string, std::string>>;

struct RunConfig {
    std::string state_path;
    double epsilon = 0.1;
    std::optional<double> dt_min;
    std::optional<double> refine_tol;
    std::optional<double> t_max;
    int k = 1;
    std::string output;
    std::string format = "json";
    std::uint64_t seed = 0;
};

std::string num(double x) { return std::isfinite(x) ? format_number(x) : "inf"; }
std::string num(const std::optional<double>& x) { return x ? num(*x) : "n/a"; }

void add_log(Table& t, const std::string& name, const std::optional<LogScaled>& v) {
    if (!v) {
        t.emplace_back(name, "n/a");
        return;
    }
    const auto value = v->value();
    t.emplace_back(name, value ? num(*value) : "overflow");
    t.emplace_back(name + "_log10", num(v->log10()));
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write output file '" + path + "'");
    f << body;
}

void print_table(std::ostream& out, const Table& table) {
    std::size_t width = 0;
    for (const auto& row : table) width = std::max(width, row.first.size());
    for (const auto& [name, value] : table) {
        out << std::left << std::setw(static_cast<int>(width) + 2) << name << value << '\n';
    }
}

// The table goes to stdout; the document goes to --output when given,
// otherwise to stdout after the table (JSON) or in place of it (CSV).
void emit(const RunConfig& rc, const Table& table, const Json& doc, std::ostream& out) {
    std::string body;
    if (rc.format == "csv") {
        std::ostringstream os;
        os << "name,value\n";
        for (const auto& [name, value] : table) os << name << ',' << value << '\n';
        body = os.str();
    } else {
        body = doc.dump(2) + "\n";
    }
    if (!rc.output.empty()) {
        print_table(out, table);
        write_file(rc.output, body);
    } else if (rc.format == "csv") {
        out << body;
    } else {
        print_table(out, table);
        out << body;
    }
}

CrossingQuery make_query(const SpectralState& state, const RunConfig& rc, int k) {
    CrossingQuery q = CrossingQuery::defaults(state, rc.epsilon, k);
    if (rc.dt_min) q.dt_min = *rc.dt_min;
    if (rc.refine_tol) q.refine_tol = *rc.refine_tol;
    q.t_max = rc.t_max;
    return q;
}

void add_state_options(CLI::App* sub, RunConfig& rc, bool need_epsilon) {
    sub->add_option("--state", rc.state_path, "state file (JSON or CSV)")->required();
    auto* e = sub->add_option("--epsilon", rc.epsilon, "trace-distance threshold in (0, 1)");
    if (need_epsilon) e->required();
}

void add_solver_options(CLI::App* sub, RunConfig& rc) {
    sub->add_option("--dt-min", rc.dt_min, "smallest march step (default 1e-6 / L)");
    sub->add_option("--refine-tol", rc.refine_tol, "bisection tolerance (default 1e-10 / L)");
    sub->add_option("--t-max", rc.t_max, "search horizon");
}

void add_output_options(CLI::App* sub, RunConfig& rc) {
    sub->add_option("--output", rc.output, "write the document to this file");
    sub->add_option("--format", rc.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

int cmd_moments(const RunConfig& rc, std::optional<double> delta, std::ostream& out) {
    const SpectralState state = load_state(rc.state_path);
    const MomentSummary m = moments(state);
    Table t{{"dimension", std::to_string(state.dimension())},
            {"mean", num(m.mean)},
            {"second_moment", num(m.second_moment)},
            {"variance", num(m.variance)},
            {"fourth_central", num(m.fourth_central)},
            {"eps_star", num(m.eps_star)},
            {"lipschitz", num(m.lipschitz)},
            {"d_eff", num(effective_dimension(state))}};
    Json doc{{"dimension", state.dimension()}, {"moments", to_json(m)},
             {"d_eff", round_sig(effective_dimension(state))}};
    if (state.dimension() <= kDenseLimit) {
        const CommutatorReport x = commutator_operator(state);
        const double bound = m.variance + std::sqrt(m.fourth_central);
        t.emplace_back("x_h_norm", num(x.norm));
        t.emplace_back("x_h_norm_bound", num(bound));
        doc["x_h_norm"] = round_sig(x.norm);
        doc["x_h_norm_bound"] = round_sig(bound);
    }
    if (delta) {
        const SupportSet s = effective_support(state, *delta);
        t.emplace_back("d_supp", std::to_string(s.size()));
        t.emplace_back("support_mass", num(s.mass));
        doc["support"] = to_json(s);
    }
    emit(rc, t, doc, out);
    return kExitOk;
}

int cmd_exit(const RunConfig& rc, std::ostream& out) {
    const SpectralState state = load_state(rc.state_path);
    const TimingCertificate cert = find_exit(state, make_query(state, rc, 0));
    Table t{{"t_exit", num(cert.t_exit)},
            {"status", std::string(to_string(cert.status))},
            {"miss_tol", num(cert.miss_tol)},
            {"evaluations", std::to_string(cert.evaluations)}};
    emit(rc, t, to_json(cert), out);
    return cert.status == SearchStatus::HorizonExhausted ? kExitHorizon : kExitOk;
}

int cmd_recur(const RunConfig& rc, std::ostream& out) {
    const SpectralState state = load_state(rc.state_path);
    const TimingCertificate cert = find_recurrences(state, make_query(state, rc, rc.k));
    Table t{{"t_exit", num(cert.t_exit)}};
    for (std::size_t j = 0; j < cert.recurrences.size(); ++j) {
        t.emplace_back("t_rec_" + std::to_string(j + 1), num(cert.recurrences[j]));
    }
    t.emplace_back("status", std::string(to_string(cert.status)));
    t.emplace_back("miss_tol", num(cert.miss_tol));
    t.emplace_back("evaluations", std::to_string(cert.evaluations));
    emit(rc, t, to_json(cert), out);
    const bool complete = cert.recurrences.size() == static_cast<std::size_t>(rc.k);
    return cert.status == SearchStatus::NeverExitsAnalytic || complete ? kExitOk : kExitHorizon;
}

int cmd_bounds(const RunConfig& rc, bool k_given, std::optional<std::size_t> particles,
               std::optional<std::size_t> single_dim, std::ostream& out) {
    const SpectralState state = load_state(rc.state_path);
    BoundContext ctx;
    ctx.particles = particles;
    ctx.single_dim = single_dim;
    const TimingCertificate cert = find_exit(state, make_query(state, rc, 0));
    ctx.t_exit = cert.t_exit;
    if (k_given) {
        ctx.k = rc.k;
        if (2.0 * rc.epsilon < 1.0) {
            RunConfig doubled = rc;
            doubled.epsilon = 2.0 * rc.epsilon;
            ctx.t_exit_double = find_exit(state, make_query(state, doubled, 0)).t_exit;
        }
    }
    const BoundReport r = evaluate_bounds(state, rc.epsilon, ctx);
    Table t{{"t_exit", num(cert.t_exit)},
            {"epsilon", num(r.epsilon)},
            {"eps_star", num(r.eps_star)},
            {"mt_lower", num(r.mt_lower)},
            {"qsl_upper", num(r.qsl_upper)}};
    add_log(t, "moment_rec_upper", r.moment_rec_upper);
    add_log(t, "kth_rec_upper", r.kth_rec_upper);
    add_log(t, "concrete_rec_upper", r.concrete_rec_upper);
    add_log(t, "reduced_rec_upper", r.reduced_rec_upper);
    add_log(t, "reduced_improved_upper", r.reduced_improved_upper);
    t.emplace_back("d_supp_quarter", std::to_string(r.d_supp_quarter));
    t.emplace_back("d_supp_half", std::to_string(r.d_supp_half));
    add_log(t, "free_rec_upper", r.free_rec_upper);
    t.emplace_back("unitary_exit_upper", num(r.unitary_exit_upper));
    add_log(t, "unitary_rec_upper", r.unitary_rec_upper);
    t.emplace_back("finite", r.finite.finite ? "true" : "false");
    Json doc = to_json(r);
    doc["t_exit"] = cert.t_exit ? Json(round_sig(*cert.t_exit)) : Json(nullptr);
    doc["t_exit_double"] =
        ctx.t_exit_double ? Json(round_sig(*ctx.t_exit_double)) : Json(nullptr);
    emit(rc, t, doc, out);
    return kExitOk;
}

int cmd_finite(const RunConfig& rc, std::ostream& out) {
    const SpectralState state = load_state(rc.state_path);
    const FinitenessVerdict v = finiteness(state, rc.epsilon);
    Table t{{"finite", v.finite ? "true" : "false"},
            {"infimum_fidelity", num(v.infimum_fidelity)},
            {"threshold", num(v.threshold)},
            {"p_max", num(v.p_max)},
            {"assumes_rational_independence", v.assumes_rational_independence ? "true" : "false"}};
    emit(rc, t, to_json(v), out);
    return kExitOk;
}

struct CoverOptions {
    std::optional<std::size_t> dim;
    std::string flavor = "state";
    std::uint64_t samples = 100000;
    std::string base;
};

int cmd_cover(const RunConfig& rc, const CoverOptions& co, std::ostream& out) {
    const auto flavor = net_flavor_from_string(co.flavor);
    if (!flavor) throw PreconditionError("cover-check: flavor must be 'state' or 'unitary'");
    std::optional<SpectralState> base;
    if (!co.base.empty()) base = load_state(co.base);
    std::size_t d = 0;
    if (base) {
        if (*flavor != NetFlavor::StateTorus) {
            throw PreconditionError("cover-check: --base applies to the state flavor only");
        }
        if (co.dim && *co.dim != base->dimension()) {
            throw PreconditionError("cover-check: --dim does not match the base state");
        }
        d = base->dimension();
    } else if (co.dim) {
        d = *co.dim;
    } else {
        throw PreconditionError("cover-check: need --dim or --base");
    }
    const PhaseNet net = build_phase_net(rc.epsilon, d, *flavor, base ? &*base : nullptr);
    const CoveringResult res = covering_check(net, co.samples, rc.seed);
    Table t{{"flavor", std::string(to_string(*flavor))},
            {"dimension", std::to_string(d)},
            {"resolution", std::to_string(net.resolution())},
            {"net_size_log10", num(net.log10_size())},
            {"covering_radius", num(net.covering_radius())},
            {"max_distance", num(res.max_distance)},
            {"pass", res.pass ? "true" : "false"},
            {"samples", std::to_string(res.samples)}};
    emit(rc, t, to_json(res), out);
    return kExitOk;
}

int cmd_diamond(const RunConfig& rc, const std::string& theta_text, const std::string& prime_text,
                std::optional<std::size_t> grid, std::ostream& out) {
    const auto theta = parse_phase_list(theta_text);
    const auto prime = parse_phase_list(prime_text);
    const double dist = diagonal_diamond_distance(theta, prime);
    Table t{{"diamond_distance", num(dist)}};
    Json doc{{"distance", round_sig(dist)}};
    if (grid) {
        const double g = diamond_distance_grid(theta, prime, *grid);
        t.emplace_back("grid_distance", num(g));
        doc["grid_distance"] = round_sig(g);
    }
    emit(rc, t, doc, out);
    return kExitOk;
}

struct EnsembleOptions {
    std::optional<std::size_t> dim;
    std::string sweep;
    std::uint64_t trials = 100;
    std::string family = "uniform";
    std::optional<double> probe_t;
    std::string rec_horizon = "auto";
    std::size_t bootstrap = 1000;
    bool no_monotone = false;
};

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw PreconditionError("--dim-sweep: expected a..b");
    try {
        const auto a = std::stoul(text.substr(0, dots));
        const auto b = std::stoul(text.substr(dots + 2));
        if (a < 1 || b <= a) throw PreconditionError("--dim-sweep: need 1 <= a < b");
        return {a, b};
    } catch (const std::logic_error&) {
        throw PreconditionError("--dim-sweep: cannot parse '" + text + "'");
    }
}

int cmd_ensemble(const RunConfig& rc, const EnsembleOptions& eo, std::ostream& out) {
    EnsembleConfig cfg;
    cfg.epsilon = rc.epsilon;
    cfg.trials = eo.trials;
    cfg.seed = rc.seed;
    cfg.t_probe = eo.probe_t;
    cfg.check_monotone = !eo.no_monotone;
    parse_family(eo.family, cfg);
    if (eo.rec_horizon == "auto") {
        cfg.recurrence = RecurrencePolicy::Auto;
    } else if (eo.rec_horizon == "none") {
        cfg.recurrence = RecurrencePolicy::None;
    } else {
        cfg.recurrence = RecurrencePolicy::Fixed;
        try {
            std::size_t used = 0;
            cfg.rec_horizon = std::stod(eo.rec_horizon, &used);
            if (used != eo.rec_horizon.size()) throw std::invalid_argument(eo.rec_horizon);
        } catch (const std::logic_error&) {
            throw PreconditionError("--rec-horizon: expected auto, none or a number");
        }
    }
    if (eo.dim.has_value() == !eo.sweep.empty()) {
        throw PreconditionError("ensemble: give exactly one of --dim and --dim-sweep");
    }

    std::ostringstream csv;
    csv << trial_csv_header() << '\n';
    Json doc;
    if (eo.dim) {
        cfg.d = *eo.dim;
        const EnsembleSummary s = run_ensemble(cfg);
        write_trial_csv_rows(csv, cfg.d, s.records);
        doc = to_json(s);
    } else {
        const auto [a, b] = parse_range(eo.sweep);
        std::vector<std::size_t> dims;
        for (std::size_t d = a; d <= b; ++d) dims.push_back(d);
        const SweepSummary s = run_sweep(cfg, dims, eo.bootstrap);
        for (const auto& run : s.runs) write_trial_csv_rows(csv, run.config.d, run.records);
        doc = to_json(s);
    }
    if (!rc.output.empty()) {
        write_file(rc.output, csv.str());
        out << doc.dump(2) << '\n';
    } else if (rc.format == "csv") {
        out << csv.str();
    } else {
        out << doc.dump(2) << '\n';
    }
    return kExitOk;
}

Json qutrit_json(const QutritReport& r) {
    Json rec = Json::array();
    for (double t : r.recurrences) rec.push_back(round_sig(t));
    return Json{{"epsilon", round_sig(r.epsilon)},
                {"ratio", round_sig(r.ratio)},
                {"horizon", round_sig(r.horizon)},
                {"t_exit", round_sig(r.t_exit)},
                {"recurrence_count", r.recurrences.size()},
                {"max_gap", round_sig(r.max_gap)},
                {"gap_after", r.gap_after},
                {"gap_ratio", round_sig(r.gap_ratio)},
                {"status", std::string(to_string(r.status))},
                {"recurrences", rec}};
}

int cmd_scenario(const RunConfig& rc, const std::string& name, std::vector<double> ratios,
                 double horizon, std::ostream& out) {
    if (name != "qutrit") throw PreconditionError("scenario: unknown scenario '" + name + "'");
    if (ratios.empty()) ratios = {1e2, 1e3, 1e4};
    const QutritSweep s = qutrit_sweep(rc.epsilon, ratios, horizon);
    Table t;
    Json runs = Json::array();
    for (const auto& r : s.runs) {
        const std::string tag = "ratio=" + num(r.ratio);
        t.emplace_back(tag + " t_exit", num(r.t_exit));
        t.emplace_back(tag + " recurrences", std::to_string(r.recurrences.size()));
        t.emplace_back(tag + " max_gap", num(r.max_gap));
        t.emplace_back(tag + " gap_ratio", num(r.gap_ratio));
        runs.push_back(qutrit_json(r));
    }
    t.emplace_back("monotone", s.monotone ? "true" : "false");
    t.emplace_back("verdict", s.pass ? "PASS" : "FAIL");
    Json doc{{"runs", runs}, {"monotone", s.monotone}, {"pass", s.pass}};
    emit(rc, t, doc, out);
    return kExitOk;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

// Pulls --config out of the argument list and appends every key from the file
// that the command line does not already set.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw PreconditionError("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    for (const auto& [key, value] : parse_config(buf.str())) {
        const std::string flag = "--" + key;
        if (has_flag(args, flag)) continue;
        if (value == "true") {
            args.push_back(flag);
        } else if (value != "false") {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_phase(const std::string& token) {
    const std::string s = trim(token);
    if (s.empty()) throw PreconditionError("phase list: empty entry");
    const auto pos = s.find("pi");
    try {
        if (pos == std::string::npos) {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        }
        std::string coef = trim(s.substr(0, pos));
        if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
        double c = 1.0;
        if (coef == "-") {
            c = -1.0;
        } else if (coef == "+") {
            c = 1.0;
        } else if (!coef.empty()) {
            std::size_t used = 0;
            c = std::stod(coef, &used);
            if (used != coef.size()) throw std::invalid_argument(coef);
        }
        const std::string rest = trim(s.substr(pos + 2));
        double den = 1.0;
        if (!rest.empty()) {
            if (rest.front() != '/') throw std::invalid_argument(rest);
            const std::string d = trim(rest.substr(1));
            std::size_t used = 0;
            den = std::stod(d, &used);
            if (used != d.size() || den == 0.0) throw std::invalid_argument(d);
        }
        return c * std::numbers::pi / den;
    } catch (const std::logic_error&) {
        throw PreconditionError("phase list: cannot parse '" + s + "'");
    }
}

}  // namespace

std::vector<double> parse_phase_list(std::string_view text) {
    std::vector<double> out;
    std::stringstream ss{std::string(text)};
    std::string token;
    while (std::getline(ss, token, ',')) out.push_back(parse_phase(token));
    if (out.empty()) throw PreconditionError("phase list: empty");
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_config(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw PreconditionError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(t.substr(0, eq));
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        if (key.empty()) {
            throw PreconditionError("config line " + std::to_string(lineno) + ": empty key");
        }
        out.emplace_back(key, trim(t.substr(eq + 1)));
    }
    return out;
}

QutritReport qutrit_scenario(double epsilon, double ratio, double horizon) {
    if (!(epsilon > 0.0 && epsilon <= 0.3)) {
        throw PreconditionError("qutrit: epsilon must lie in (0, 0.3]");
    }
    if (!(ratio >= 10.0) || !std::isfinite(ratio)) throw PreconditionError("qutrit: ratio must be >= 10");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw PreconditionError("qutrit: horizon must be positive");
    }
    const double delta = epsilon * epsilon;
    const std::vector<double> p{0.5, 0.5 - delta, delta};
    const SpectralState state = SpectralState::from_probabilities({0.0, 1.0, ratio}, p);

    CrossingQuery q = CrossingQuery::defaults(state, epsilon, INT_MAX);
    q.t_max = horizon;
    const TimingCertificate cert = find_recurrences(state, q);
    if (!cert.t_exit) throw HorizonError("qutrit: no exit before the horizon");
    if (cert.recurrences.size() < 2) {
        throw HorizonError("qutrit: fewer than two recurrences before the horizon");
    }

    QutritReport r;
    r.epsilon = epsilon;
    r.ratio = ratio;
    r.horizon = horizon;
    r.t_exit = *cert.t_exit;
    r.recurrences = cert.recurrences;
    r.status = cert.status;
    for (std::size_t j = 0; j + 1 < r.recurrences.size(); ++j) {
        const double gap = r.recurrences[j + 1] - r.recurrences[j];
        if (gap > r.max_gap) {
            r.max_gap = gap;
            r.gap_after = j;
        }
    }
    r.gap_ratio = r.max_gap / r.t_exit;
    return r;
}

QutritSweep qutrit_sweep(double epsilon, std::span<const double> ratios, double horizon) {
    if (ratios.empty()) throw PreconditionError("qutrit: no ratios given");
    QutritSweep s;
    for (double ratio : ratios) s.runs.push_back(qutrit_scenario(epsilon, ratio, horizon));
    s.monotone = true;
    for (std::size_t i = 1; i < s.runs.size(); ++i) {
        if (!(s.runs[i].ratio > s.runs[i - 1].ratio) ||
            !(s.runs[i].gap_ratio > s.runs[i - 1].gap_ratio)) {
            s.monotone = false;
        }
    }
    s.pass = s.monotone && s.runs.back().gap_ratio > 100.0;
    return s;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        args = apply_config(std::move(args));
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitPrecondition;
    }

    CLI::App app{"Exit and recurrence times of pure states under diagonal Hamiltonians"};
    app.name(argc > 0 ? argv[0] : "reclab");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    RunConfig rc;
    std::optional<double> delta;
    std::optional<std::size_t> particles, single_dim;
    CoverOptions co;
    std::string theta, theta_prime;
    std::optional<std::size_t> grid;
    EnsembleOptions eo;
    std::string scenario_name;
    std::vector<double> ratios;
    double horizon = kQutritHorizon;

    auto* moments_cmd = app.add_subcommand("moments", "energy moments, X_H norm and support");
    add_state_options(moments_cmd, rc, false);
    moments_cmd->add_option("--delta", delta, "also report the effective support at this tail");
    add_output_options(moments_cmd, rc);

    auto* exit_cmd = app.add_subcommand("exit", "certified exit time");
    add_state_options(exit_cmd, rc, true);
    add_solver_options(exit_cmd, rc);
    add_output_options(exit_cmd, rc);

    auto* recur_cmd = app.add_subcommand("recur", "exit followed by k recurrences");
    add_state_options(recur_cmd, rc, true);
    add_solver_options(recur_cmd, rc);
    recur_cmd->add_option("--k", rc.k, "number of recurrences")->check(CLI::PositiveNumber);
    add_output_options(recur_cmd, rc);

    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form exit and recurrence bounds");
    add_state_options(bounds_cmd, rc, true);
    add_solver_options(bounds_cmd, rc);
    auto* k_opt = bounds_cmd->add_option("--k", rc.k, "index for the k-th recurrence bound")
                      ->check(CLI::PositiveNumber);
    bounds_cmd->add_option("--particles", particles, "free-evolution bound: number of copies");
    bounds_cmd->add_option("--single-dim", single_dim, "free-evolution bound: levels per copy");
    add_output_options(bounds_cmd, rc);

    auto* finite_cmd = app.add_subcommand("finite", "does the state ever exit the eps-ball");
    add_state_options(finite_cmd, rc, true);
    add_output_options(finite_cmd, rc);

    auto* cover_cmd = app.add_subcommand("cover-check", "sample-test a phase-grid covering net");
    cover_cmd->add_option("--epsilon", rc.epsilon, "covering scale")->required();
    cover_cmd->add_option("--dim", co.dim, "dimension");
    cover_cmd->add_option("--flavor", co.flavor, "state or unitary")
        ->check(CLI::IsMember({"state", "unitary"}));
    cover_cmd->add_option("--samples", co.samples, "number of random points");
    cover_cmd->add_option("--seed", rc.seed, "random seed");
    cover_cmd->add_option("--base", co.base, "state file supplying |a_k|");
    add_output_options(cover_cmd, rc);

    auto* diamond_cmd =
        app.add_subcommand("diamond", "distance between two commuting diagonal unitaries");
    diamond_cmd->add_option("--theta", theta, "phases, e.g. 0,pi/2")->required();
    diamond_cmd->add_option("--theta-prime", theta_prime, "phases of the second unitary")
        ->required();
    diamond_cmd->add_option("--grid", grid, "also scan this many global phases");
    add_output_options(diamond_cmd, rc);

    auto* ens_cmd = app.add_subcommand("ensemble", "random-spectrum Monte Carlo");
    ens_cmd->add_option("--dim", eo.dim, "dimension");
    ens_cmd->add_option("--dim-sweep", eo.sweep, "dimension range a..b with a slope fit");
    ens_cmd->add_option("--epsilon", rc.epsilon, "threshold")->required();
    ens_cmd->add_option("--trials", eo.trials, "trials per dimension");
    ens_cmd->add_option("--seed", rc.seed, "random seed");
    ens_cmd->add_option("--family", eo.family, "uniform or eta:<value>");
    ens_cmd->add_option("--probe-t", eo.probe_t, "also estimate P(D(t) < eps) at this time");
    ens_cmd->add_option("--rec-horizon", eo.rec_horizon, "auto, none or a time");
    ens_cmd->add_option("--bootstrap", eo.bootstrap, "bootstrap resamples for the sweep slope");
    ens_cmd->add_flag("--no-monotone", eo.no_monotone, "skip the monotonicity check");
    ens_cmd->add_option("--output", rc.output, "per-trial CSV file");
    ens_cmd->add_option("--format", rc.format, "json or csv (stdout when no --output)")
        ->check(CLI::IsMember({"json", "csv"}));
    ens_cmd->footer(kTrialColumns);

    auto* scen_cmd = app.add_subcommand("scenario", "canned scenarios");
    scen_cmd->add_option("name", scenario_name, "qutrit")->required();
    scen_cmd->add_option("--epsilon", rc.epsilon, "threshold in (0, 0.3]");
    scen_cmd->add_option("--ratio", ratios, "fast/slow level ratio, repeatable (default 1e2 1e3 1e4)");
    scen_cmd->add_option("--horizon", horizon, "search horizon (default 4 pi)");
    add_output_options(scen_cmd, rc);

    app.footer(std::string("Flags may also come from --config <file> with one key = value per "
                           "line; command-line flags win.\nRECLAB_THREADS caps the worker "
                           "count.\nExit codes: 0 ok, 2 bad input, 3 horizon reached.\n\n") +
               kTrialColumns);

    std::vector<const char*> cargv;
    cargv.push_back(argc > 0 ? argv[0] : "reclab");
    for (const auto& a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitPrecondition;
    }

    try {
        if (moments_cmd->parsed()) return cmd_moments(rc, delta, out);
        if (exit_cmd->parsed()) return cmd_exit(rc, out);
        if (recur_cmd->parsed()) return cmd_recur(rc, out);
        if (bounds_cmd->parsed()) return cmd_bounds(rc, k_opt->count() > 0, particles, single_dim, out);
        if (finite_cmd->parsed()) return cmd_finite(rc, out);
        if (cover_cmd->parsed()) return cmd_cover(rc, co, out);
        if (diamond_cmd->parsed()) return cmd_diamond(rc, theta, theta_prime, grid, out);
        if (ens_cmd->parsed()) return cmd_ensemble(rc, eo, out);
        if (scen_cmd->parsed()) return cmd_scenario(rc, scenario_name, ratios, horizon, out);
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const HorizonError& e) {
        err << "error: " << e.what() << '\n';
        return kExitHorizon;
    }
    err << "error: no subcommand\n";
    return kExitPrecondition;
}

}  // namespace reclab
