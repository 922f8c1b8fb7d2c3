#include "reclab/io.hpp"

#include "reclab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace reclab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw PreconditionError("state file: cannot parse " + what + " '" + s + "'");
    }
}

SpectralState parse_json_state(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw PreconditionError(std::string("state file: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("eigenvalues") || !j.contains("amplitudes")) {
        throw PreconditionError("state file: need 'eigenvalues' and 'amplitudes'");
    }
    try {
        auto lam = j.at("eigenvalues").get<std::vector<double>>();
        std::vector<Complex> amps;
        for (const auto& a : j.at("amplitudes")) {
            if (a.is_number()) {
                amps.emplace_back(a.get<double>(), 0.0);
            } else if (a.is_array() && a.size() == 2) {
                amps.emplace_back(a[0].get<double>(), a[1].get<double>());
            } else {
                throw PreconditionError("state file: amplitude must be [re, im] or a number");
            }
        }
        return SpectralState::validate(std::move(lam), std::move(amps));
    } catch (const Json::exception& e) {
        throw PreconditionError(std::string("state file: ") + e.what());
    }
}

SpectralState parse_csv_state(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    std::vector<double> lam;
    std::vector<Complex> amps;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto cells = split(t, ',');
        if (!header) {
            if (cells.size() != 3 || cells[0] != "lambda" || cells[1] != "re" || cells[2] != "im") {
                throw PreconditionError("state file: CSV header must be lambda,re,im");
            }
            header = true;
            continue;
        }
        if (cells.size() != 3) throw PreconditionError("state file: CSV row needs 3 columns");
        lam.push_back(parse_double(cells[0], "lambda"));
        amps.emplace_back(parse_double(cells[1], "re"), parse_double(cells[2], "im"));
    }
    if (!header) throw PreconditionError("state file: empty CSV");
    return SpectralState::validate(std::move(lam), std::move(amps));
}

Json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round_sig(x);
}

Json number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

Json log_scaled(const std::optional<LogScaled>& v) { return v ? to_json(*v) : Json(nullptr); }

Json quantiles_json(const Quantiles& q) {
    return Json{{"q10", number(q.q10)}, {"q50", number(q.q50)}, {"q90", number(q.q90)}};
}

std::string csv_number(double x) { return std::isfinite(x) ? format_number(x) : ""; }
std::string csv_number(const std::optional<double>& x) { return x ? csv_number(*x) : ""; }

}  // namespace

SpectralState parse_state(std::string_view text) {
    const std::string t = trim(text);
    if (t.empty()) throw PreconditionError("state file: empty");
    return t.front() == '{' ? parse_json_state(t) : parse_csv_state(t);
}

SpectralState load_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot read state file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_state(buf.str());
}

Json state_to_json(const SpectralState& state) {
    Json lam = Json::array();
    Json amps = Json::array();
    for (std::size_t k = 0; k < state.dimension(); ++k) {
        lam.push_back(state.eigenvalues()[k]);
        amps.push_back(Json::array({state.amplitudes()[k].real(), state.amplitudes()[k].imag()}));
    }
    return Json{{"eigenvalues", lam}, {"amplitudes", amps}};
}

double round_sig(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    return std::strtod(format_number(x).c_str(), nullptr);
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

Json to_json(const TimingCertificate& cert) {
    Json rec = Json::array();
    for (double t : cert.recurrences) rec.push_back(round_sig(t));
    return Json{{"t_exit", number(cert.t_exit)},
                {"recurrences", rec},
                {"miss_tol", number(cert.miss_tol)},
                {"status", std::string(to_string(cert.status))},
                {"evaluations", cert.evaluations},
                {"horizon", number(cert.horizon)}};
}

TimingCertificate certificate_from_json(const Json& j) {
    try {
        TimingCertificate c;
        if (!j.at("t_exit").is_null()) c.t_exit = j.at("t_exit").get<double>();
        c.recurrences = j.at("recurrences").get<std::vector<double>>();
        c.miss_tol = j.at("miss_tol").get<double>();
        const auto status = search_status_from_string(j.at("status").get<std::string>());
        if (!status) throw PreconditionError("certificate: unknown status");
        c.status = *status;
        c.evaluations = j.at("evaluations").get<std::uint64_t>();
        if (j.contains("horizon") && !j.at("horizon").is_null()) {
            c.horizon = j.at("horizon").get<double>();
        }
        return c;
    } catch (const Json::exception& e) {
        throw PreconditionError(std::string("certificate: ") + e.what());
    }
}

Json to_json(const MomentSummary& m) {
    return Json{{"mean", number(m.mean)},
                {"second_moment", number(m.second_moment)},
                {"variance", number(m.variance)},
                {"fourth_central", number(m.fourth_central)},
                {"eps_star", number(m.eps_star)},
                {"lipschitz", number(m.lipschitz)}};
}

Json to_json(const LogScaled& v) {
    const auto value = v.value();
    return Json{{"log10", number(v.log10())}, {"value", value ? number(*value) : Json("overflow")}};
}

Json to_json(const FinitenessVerdict& f) {
    return Json{{"finite", f.finite},
                {"infimum_fidelity", number(f.infimum_fidelity)},
                {"threshold", number(f.threshold)},
                {"p_max", number(f.p_max)},
                {"assumes_rational_independence", f.assumes_rational_independence}};
}

Json to_json(const BoundReport& r) {
    return Json{{"epsilon", number(r.epsilon)},
                {"eps_star", number(r.eps_star)},
                {"mt_lower", number(r.mt_lower)},
                {"qsl_upper", number(r.qsl_upper)},
                {"moment_rec_upper", log_scaled(r.moment_rec_upper)},
                {"kth_rec_upper", log_scaled(r.kth_rec_upper)},
                {"concrete_rec_upper", log_scaled(r.concrete_rec_upper)},
                {"reduced_rec_upper", log_scaled(r.reduced_rec_upper)},
                {"reduced_improved_upper", log_scaled(r.reduced_improved_upper)},
                {"d_supp_quarter", r.d_supp_quarter},
                {"d_supp_half", r.d_supp_half},
                {"free_rec_upper", log_scaled(r.free_rec_upper)},
                {"unitary_exit_upper", number(r.unitary_exit_upper)},
                {"unitary_rec_upper", log_scaled(r.unitary_rec_upper)},
                {"finiteness", to_json(r.finite)},
                {"notes", r.notes}};
}

Json to_json(const SupportSet& s) {
    return Json{{"indices", s.indices}, {"mass", number(s.mass)}, {"delta", number(s.delta)}};
}

SupportSet support_from_json(const Json& j) {
    try {
        SupportSet s;
        s.indices = j.at("indices").get<std::vector<std::size_t>>();
        s.mass = j.at("mass").get<double>();
        s.delta = j.at("delta").get<double>();
        return s;
    } catch (const Json::exception& e) {
        throw PreconditionError(std::string("support set: ") + e.what());
    }
}

Json to_json(const CoveringResult& c) {
    return Json{{"max_distance", number(c.max_distance)}, {"pass", c.pass}, {"samples", c.samples}};
}

Json to_json(const TrialRecord& r) {
    const auto& w = r.windows;
    return Json{{"trial_id", r.trial_id},
                {"spectrum_seed", r.spectrum_seed},
                {"moments", to_json(r.moments)},
                {"fourth_raw", number(r.fourth_raw)},
                {"windows", Json{{"mean", w.mean},
                                 {"second_moment", w.second_moment},
                                 {"variance", w.variance},
                                 {"fourth_moment", w.fourth_moment},
                                 {"eps_star", w.eps_star}}},
                {"exit_status", std::string(to_string(r.exit_status))},
                {"t_exit", number(r.t_exit)},
                {"mt_lower", number(r.mt_lower)},
                {"qsl_upper", number(r.qsl_upper)},
                {"miss_tol", number(r.miss_tol)},
                {"exit_window", r.exit_window},
                {"rec_attempted", r.rec_attempted},
                {"t_rec", number(r.t_rec)},
                {"rec_horizon", number(r.rec_horizon)},
                {"monotone_ok", r.monotone_ok},
                {"d_eff", number(r.d_eff)},
                {"d_supp_quarter", r.d_supp_quarter}};
}

Json to_json(const ProximityEstimate& p) {
    return Json{{"hits", p.hits},
                {"trials", p.trials},
                {"estimate", number(p.estimate)},
                {"ci_low", number(p.ci_low)},
                {"ci_high", number(p.ci_high)},
                {"bound", to_json(p.bound)},
                {"vacuous", p.vacuous}};
}

Json to_json(const EnsembleSummary& s) {
    const auto& c = s.config;
    std::string policy = "auto";
    if (c.recurrence == RecurrencePolicy::None) policy = "none";
    if (c.recurrence == RecurrencePolicy::Fixed) policy = "fixed";
    return Json{{"d", c.d},
                {"epsilon", number(c.epsilon)},
                {"trials", c.trials},
                {"seed", c.seed},
                {"family", family_label(c)},
                {"recurrence_policy", policy},
                {"window_fraction", number(s.window_fraction)},
                {"exit_window_fraction", number(s.exit_window_fraction)},
                {"joint_fraction", number(s.joint_fraction)},
                {"monotone_fraction", number(s.monotone_fraction)},
                {"sandwich_violations", s.sandwich_violations},
                {"exited", s.exited},
                {"t_exit", quantiles_json(s.t_exit)},
                {"t_rec", quantiles_json(s.t_rec)},
                {"rec_found", s.rec_found},
                {"rec_censored", s.rec_censored},
                {"median_log_t_rec", number(s.median_log_t_rec)},
                {"proximity", s.proximity ? to_json(*s.proximity) : Json(nullptr)}};
}

Json to_json(const SweepSummary& s) {
    Json runs = Json::array();
    for (const auto& r : s.runs) runs.push_back(to_json(r));
    Json medians = Json::array();
    for (double m : s.median_log_t_rec) medians.push_back(number(m));
    return Json{{"runs", runs},
                {"median_log_t_rec", medians},
                {"slope", number(s.slope)},
                {"ci_low", number(s.ci_low)},
                {"ci_high", number(s.ci_high)},
                {"positive", s.positive}};
}

std::string trial_csv_header() {
    return "d,trial_id,spectrum_seed,mean,second_moment,variance,fourth_raw,eps_star,"
           "windows_ok,exit_status,t_exit,mt_lower,qsl_upper,miss_tol,exit_window,"
           "t_rec,rec_censored,rec_horizon,monotone_ok,d_eff,d_supp_quarter";
}

void write_trial_csv_rows(std::ostream& os, std::size_t d, std::span<const TrialRecord> records) {
    for (const auto& r : records) {
        os << d << ',' << r.trial_id << ',' << r.spectrum_seed << ',' << csv_number(r.moments.mean)
           << ',' << csv_number(r.moments.second_moment) << ',' << csv_number(r.moments.variance)
           << ',' << csv_number(r.fourth_raw) << ',' << csv_number(r.moments.eps_star) << ','
           << int(r.windows.all()) << ',' << to_string(r.exit_status) << ','
           << csv_number(r.t_exit) << ',' << csv_number(r.mt_lower) << ','
           << csv_number(r.qsl_upper) << ',' << csv_number(r.miss_tol) << ','
           << int(r.exit_window) << ',' << csv_number(r.t_rec) << ',' << int(r.rec_censored())
           << ',' << csv_number(r.rec_horizon) << ',' << int(r.monotone_ok) << ','
           << csv_number(r.d_eff) << ',' << r.d_supp_quarter << '\n';
    }
}

}  // namespace reclab
