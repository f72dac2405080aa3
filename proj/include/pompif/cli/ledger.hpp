#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pompif::cli {

/// One likelihood evaluation kept for the record.
struct LedgerRecord {
  std::string timestamp;  // UTC, ISO 8601
  std::string workflow;   // pfilter | mif2 | profile
  std::string model;
  std::string params;     // name=value;... with 17 significant digits
  double loglik = 0.0;
  double loglik_se = 0.0;
  std::size_t particles = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

std::string utc_timestamp();

/// Appends one row, writing the header first if the file is new. Rows from
/// concurrent writers (threads or processes) never interleave.
/// Throws std::system_error if the file cannot be written.
void ledger_append(const LedgerRecord& record, const std::filesystem::path& path);

std::vector<LedgerRecord> read_ledger(const std::filesystem::path& path);

}  // namespace pompif::cli
