// io.hpp: state files and JSON / CSV emission. Every double written goes
// through round_sig, so output is stable at 9 significant digits.
#pragma once

#include "reclab/bounds.hpp"
#include "reclab/ensembles.hpp"
#include "reclab/geometry.hpp"
#include "reclab/spectral.hpp"
#include "reclab/structure.hpp"
#include "reclab/timing.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

namespace reclab {

using Json = nlohmann::ordered_json;

// JSON {"eigenvalues":[...], "amplitudes":[[re,im],...]} or CSV with header
// lambda,re,im. Text starting with '{' is read as JSON.
SpectralState parse_state(std::string_view text);
SpectralState load_state(const std::filesystem::path& path);
Json state_to_json(const SpectralState& state);

double round_sig(double x);             // 9 significant digits
std::string format_number(double x);    // "%.9g"

Json to_json(const TimingCertificate& cert);
TimingCertificate certificate_from_json(const Json& j);

Json to_json(const MomentSummary& m);
Json to_json(const LogScaled& v);
Json to_json(const FinitenessVerdict& f);
Json to_json(const BoundReport& r);

Json to_json(const SupportSet& s);
SupportSet support_from_json(const Json& j);

Json to_json(const CoveringResult& c);

Json to_json(const TrialRecord& r);
Json to_json(const ProximityEstimate& p);
Json to_json(const EnsembleSummary& s);
Json to_json(const SweepSummary& s);

// Per-trial table, one row per record. `d` goes in the first column so that
// sweeps can share one file.
std::string trial_csv_header();
void write_trial_csv_rows(std::ostream& os, std::size_t d, std::span<const TrialRecord> records);

}  // namespace reclab
