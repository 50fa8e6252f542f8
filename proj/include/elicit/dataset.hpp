#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/scenario.hpp"

namespace elicit {

inline constexpr int kFormatVersion = 1;

struct Provenance {
  std::vector<std::string> sources;  // files the dataset was loaded from
  int format_version = kFormatVersion;
  std::optional<std::uint64_t> seed;  // generator seed, for synthetic data
};

struct Dataset {
  Scenario scenario;
  std::vector<Expert> experts;
  std::vector<RankingSheet> rankings;
  std::vector<IntervalResponse> responses;
  Provenance provenance;

  const Expert* find_expert(const std::string& id) const;
  const RankingSheet* find_sheet(const std::string& expert_id) const;

  /// Content equality; provenance is not compared.
  bool same_content(const Dataset& other) const;
};

/// Unreadable or unparsable input.
class DatasetIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The files parsed but the data breaks an invariant. `violations` carry
/// file and record context.
class DatasetValidationError : public std::runtime_error {
 public:
  explicit DatasetValidationError(ValidationReport violations);
  const ValidationReport& violations() const noexcept { return violations_; }

 private:
  ValidationReport violations_;
};

// JSON documents. Each carries "format_version" and "kind".

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

/// The responses document: experts, ranking sheets and interval responses.
nlohmann::json responses_to_json(std::span<const Expert> experts,
                                 std::span<const RankingSheet> rankings,
                                 std::span<const IntervalResponse> responses,
                                 std::optional<std::uint64_t> seed = std::nullopt);

/// Parses `expert_id,av_id,rank` rows (header required) into sheets in first
/// appearance order. Errors name the line.
std::vector<RankingSheet> rankings_from_csv(const std::string& text, const std::string& origin);
std::string rankings_to_csv(std::span<const RankingSheet> rankings);

/// Loads every path (files, or directories whose *.json / *.csv files are read
/// in name order). Exactly one scenario document is required. Throws
/// DatasetIoError or DatasetValidationError.
Dataset load_dataset(std::span<const std::filesystem::path> paths);

/// Collects validation violations without throwing on them; I/O and parse
/// problems still throw.
struct LoadResult {
  Dataset dataset;
  ValidationReport violations;
};
LoadResult load_dataset_unchecked(std::span<const std::filesystem::path> paths);

/// Writes scenario.json and responses.json into `dir`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Canonical serialization used for hashing and round-trip checks.
std::string canonical_json(const Dataset& dataset);

/// Hex SHA-256 of canonical_json.
std::string dataset_hash(const Dataset& dataset);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace elicit
