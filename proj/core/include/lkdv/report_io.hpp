#pragma once
// JSON / CSV serialization for the report family.  Schema: every document
// carries schema_version, name, params, grid, results, and a provenance
// block embedding the full run configuration; serialization is deterministic
// (sorted keys, shortest round-trip doubles) so identical configs produce
// byte-identical files up to the timestamp.

#include <filesystem>
#include <map>
#include <string>

#include "lkdv/analysis.hpp"
#include "lkdv/spectral.hpp"

namespace lkdv {

struct Provenance {
  std::string code_version;
  uint64_t rng_seed = 0;
  std::string timestamp;  // ISO-8601 UTC; empty omits the field
  std::map<std::string, std::string> config;  // full flat RunConfig echo
};

std::string current_utc_timestamp();

std::string to_json_string(const StabilityReport& rep, const Provenance& prov);
std::string to_json_string(const SmoothingReport& rep, const Provenance& prov);
std::string to_json_string(const DecayFitReport& rep, const Provenance& prov);
std::string to_json_string(const WaveOperatorReport& rep, const Provenance& prov);
std::string to_json_string(const EigenScanReport& rep, const Provenance& prov);
std::string to_json_string(const PseudospectrumReport& rep, const Provenance& prov);
std::string to_json_string(const EvansSweepReport& rep, const Provenance& prov);
std::string to_json_string(const Trajectory& traj, const Provenance& prov);

/// Writes <outdir>/<experiment>-<timestamp>.json, appending a counter rather
/// than ever overwriting; returns the path written.
std::filesystem::path write_report(const std::string& json,
                                   const std::filesystem::path& outdir,
                                   const std::string& experiment);

/// Writes sigma_min samples as CSV (re_z, im_z, sigma_min).
std::filesystem::path write_pseudospectrum_csv(
    const PseudospectrumReport& rep, const std::filesystem::path& outdir,
    const std::string& experiment);

/// Projects a report JSON file onto flat plotting CSVs (one per curve);
/// returns the files written.  Schema mismatches raise with the field path.
std::vector<std::filesystem::path> emit_plotdata(
    const std::filesystem::path& report_json,
    const std::filesystem::path& outdir);

}  // namespace lkdv
