#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elicit/consensus.hpp"
#include "elicit/dataset.hpp"

namespace elicit {

struct ReportConfig {
  std::uint64_t seed = 1;
  std::vector<AggregationMethod> methods = all_methods();
  OutlierThresholds thresholds;
  std::size_t baseline_trials = 1000;
  /// Restrict the hop-derived method comparison to one group; empty = every
  /// expert with both a ranking sheet and overall responses.
  std::string hop_group;
};

/// A report section either holds data or says why it could not be computed.
struct SectionStatus {
  bool available = true;
  std::string reason;
};

struct BaselineSummary {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  // one random cohort, compared against its own mean ranking
  std::vector<ExpertAgreement> cohort;
  double cohort_w = 0.0;
  // W over all trials
  double mean_w = 0.0;
  double sd_w = 0.0;
  double min_w = 0.0;
  double max_w = 0.0;
};

struct AnalysisReport {
  std::string dataset_hash;
  std::uint64_t seed = 0;
  std::size_t expert_count = 0;
  std::size_t av_count = 0;
  std::map<std::string, std::string> expert_groups;

  std::map<std::string, double> mean_ranks;
  Ranking consensus;
  std::optional<double> set_kendall_w;
  SectionStatus consensus_status;

  std::vector<ExpertAgreement> expert_agreement;  // individuals vs set
  SectionStatus agreement_status;

  std::vector<OutlierLabel> outliers;
  OutlierThresholds thresholds;
  SectionStatus outlier_status;

  std::vector<GroupStats> groups;
  SectionStatus group_status;

  /// "set" plus one matrix per group.
  std::map<std::string, AgreementMatrix> matrices;
  SectionStatus matrix_status;

  std::vector<ScatterPoint> scatter;
  SectionStatus scatter_status;

  MethodTable methods;
  SectionStatus method_status;

  BaselineSummary baseline;
  SectionStatus baseline_status;
};

/// Computes every section. A failing section is marked unavailable and the
/// others still run.
AnalysisReport run_report(const Dataset& dataset, const ReportConfig& config);

/// File name -> content of every machine-readable output plus summary.md.
std::map<std::string, std::string> render_report(const AnalysisReport& report);

/// Writes render_report's files into `dir` (created if needed).
void write_report(const AnalysisReport& report, const std::filesystem::path& dir);

}  // namespace elicit
