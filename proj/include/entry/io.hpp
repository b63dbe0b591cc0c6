#pragma once

// File formats: versioned CSV for profiles, trajectory logs, Delta samples
// and Monte Carlo scatter; JSON for run summaries, certificates and batch
// statistics. Every CSV starts with "# entry-guidance <kind> v<N>"; readers
// reject other kinds and versions.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "entry/certify.hpp"
#include "entry/drag_chain.hpp"
#include "entry/montecarlo.hpp"
#include "entry/reference.hpp"
#include "entry/sim.hpp"

namespace entry {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCsvVersion = 1;

void write_profile_csv(const ReferenceProfile& profile, std::ostream& out);
void write_profile_csv(const ReferenceProfile& profile, const std::filesystem::path& path);
ReferenceProfile read_profile_csv(std::istream& in);
ReferenceProfile read_profile_csv(const std::filesystem::path& path);

void write_log_csv(const TrajectoryLog& log, std::ostream& out);
void write_log_csv(const TrajectoryLog& log, const std::filesystem::path& path);

void write_delta_samples_csv(const std::vector<DeltaSample>& samples, std::ostream& out);
void write_delta_samples_csv(const std::vector<DeltaSample>& samples,
                             const std::filesystem::path& path);
std::vector<DeltaSample> read_delta_samples_csv(std::istream& in);
std::vector<DeltaSample> read_delta_samples_csv(const std::filesystem::path& path);

void write_scatter_csv(const BatchResult& batch, const std::filesystem::path& path);

nlohmann::ordered_json to_json(const RunSummary& summary, GuidanceMode mode);
nlohmann::ordered_json to_json(const CertifyReport& report);
nlohmann::ordered_json to_json(const MCStats& stats, const DispersionSpec& spec,
                               const GuidanceConfig& gains, std::uint64_t seed);

/// Writes `j` with two-space indent and a trailing newline.
void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);

}  // namespace entry
