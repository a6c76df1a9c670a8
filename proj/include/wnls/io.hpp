#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wnls/config.hpp"
#include "wnls/flow.hpp"
#include "wnls/report.hpp"

namespace wnls {

std::string read_file(const std::filesystem::path& p);
/// Writes bytes exactly (binary mode), creating parent directories.
void write_file(const std::filesystem::path& p, std::string_view bytes);

/// Lower-case hex SHA-1 of the bytes.
std::string sha1_hex(std::string_view bytes);
/// Git blob id: SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_hash(std::string_view bytes);

/// Provenance block embedded in every artifact: resolved config and its content hash.
nlohmann::json provenance(const RunConfig& cfg);

/// report.json text: provenance plus the report.
std::string report_json(const RunConfig& cfg, const ExperimentReport& rep);

/// Field as CSV: n,re,im.
std::string field_csv(const SpectralField& f);

/// Trajectory dump: one '#'-prefixed JSON header line (provenance, spec, dt, steps),
/// then CSV t,n,re,im with a single header row.
std::string trajectory_dump(const RunConfig& cfg, const TrajectoryRecord& rec);

}  // namespace wnls
