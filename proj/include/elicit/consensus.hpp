#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elicit/interval_agg.hpp"
#include "elicit/rank_stats.hpp"
#include "elicit/scenario.hpp"

namespace elicit {

/// Per-item mean rank, re-ranked ascending with average ranks for ties.
Ranking group_mean_ranking(std::span<const Ranking> rankings);
Ranking group_mean_ranking(std::span<const RankingSheet> sheets);

/// Per-item mean rank without re-ranking.
std::map<std::string, double> mean_ranks(std::span<const Ranking> rankings);

struct ExpertAgreement {
  std::string expert_id;
  AgreementStats stats;
};

/// Spearman's rho and footrule of each sheet against the consensus, in
/// input order.
std::vector<ExpertAgreement> expert_agreement(std::span<const RankingSheet> sheets,
                                              const Ranking& consensus);

enum class OutlierClass { Strong, Neutral, Weak };

std::string_view to_string(OutlierClass label);

struct OutlierThresholds {
  double strong = 0.7;  // rho above this is a strong correlation
  double weak = 0.3;    // rho below this is a weak correlation (outlier)
};

struct ExpertRho {
  std::string expert_id;
  double rho = 0.0;
};

struct OutlierLabel {
  std::string expert_id;
  double rho = 0.0;
  OutlierClass label = OutlierClass::Neutral;
};

OutlierClass classify(double rho, const OutlierThresholds& thresholds = {});
std::vector<OutlierLabel> classify_outliers(std::span<const ExpertRho> rhos,
                                            const OutlierThresholds& thresholds = {});

/// Vote counts per attack vector. Rows follow ascending consensus rank
/// (item id breaks ties); counts[k] is the number of experts that gave rank k+1.
struct AgreementMatrix {
  struct Row {
    std::string av_id;
    double consensus_rank = 0.0;
    std::vector<int> counts;
  };
  std::vector<Row> rows;
  std::size_t experts = 0;
};

AgreementMatrix agreement_matrix(std::span<const RankingSheet> sheets, const Ranking& consensus);

struct ScatterPoint {
  std::string expert_id;
  std::string group_id;
  double d_consensus = 0.0;
  double d_reference = 0.0;
};

/// Footrule of every sheet against the consensus and the reference ranking.
std::vector<ScatterPoint> scatter_distances(std::span<const RankingSheet> sheets,
                                            std::span<const Expert> experts,
                                            const Ranking& consensus, const Ranking& reference);

/// As above, taking the reference from the expert flagged `is_reference`.
/// Throws InputError when no expert is flagged or the reference has no sheet.
std::vector<ScatterPoint> scatter_distances(std::span<const RankingSheet> sheets,
                                            std::span<const Expert> experts,
                                            const Ranking& consensus);

struct MethodOutcome {
  AggregationMethod method;
  std::optional<double> rho;  // derived vs actual; empty when undefined or failed
  std::string error;          // non-empty when the derivation failed
};

/// Derived-vs-actual rho for every method, for one expert.
std::vector<MethodOutcome> method_comparison(const RankingSheet& actual,
                                             const ExpertHopRatings& ratings,
                                             const Scenario& scenario,
                                             std::span<const AggregationMethod> methods);

/// Method comparison over a cohort: cells[method][expert] plus the mean of the
/// defined rhos per method.
struct MethodTable {
  std::vector<AggregationMethod> methods;
  std::vector<std::string> expert_ids;
  std::vector<std::vector<MethodOutcome>> cells;  // [method][expert]
  std::vector<std::optional<double>> mean_rho;    // [method]
};

MethodTable method_table(std::span<const RankingSheet> actual,
                         std::span<const ExpertHopRatings> ratings, const Scenario& scenario,
                         std::span<const AggregationMethod> methods);

/// Expert ids per group, ordered by group id then input order.
using GroupPartition = std::map<std::string, std::vector<std::string>>;

GroupPartition groups_from_experts(std::span<const Expert> experts,
                                   std::span<const RankingSheet> sheets);

struct GroupStats {
  std::string group_id;
  std::size_t size = 0;
  Ranking consensus;                         // the group's own mean ranking
  std::optional<double> rho_vs_set;          // group consensus vs set consensus
  std::optional<double> mean_rho;            // members vs group consensus
  std::optional<double> kendall_w;           // empty for single-member groups
};

/// Throws InputError for an empty group, an expert in two groups, or a
/// member without a sheet.
std::vector<GroupStats> group_vs_set(const GroupPartition& groups,
                                     std::span<const RankingSheet> sheets,
                                     const Ranking& set_consensus);

}  // namespace elicit
