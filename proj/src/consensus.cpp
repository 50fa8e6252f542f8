#include "elicit/consensus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "elicit/error.hpp"
#include "elicit/kernels.hpp"

namespace elicit {

namespace {

// Row-major rank matrix of `sheets`, columns in the item order of `items`.
std::vector<double> sheet_matrix(std::span<const RankingSheet> sheets,
                                 const std::vector<std::string>& items) {
  std::vector<double> matrix;
  matrix.reserve(sheets.size() * items.size());
  for (const auto& sheet : sheets) {
    if (sheet.ranks.size() != items.size()) {
      throw InputError("sheet of '" + sheet.expert_id + "' covers a different item set");
    }
    for (const auto& item : items) {
      auto it = sheet.ranks.find(item);
      if (it == sheet.ranks.end()) {
        throw InputError("sheet of '" + sheet.expert_id + "' does not rank '" + item + "'");
      }
      matrix.push_back(static_cast<double>(it->second));
    }
  }
  return matrix;
}

std::vector<Ranking> to_rankings(std::span<const RankingSheet> sheets) {
  std::vector<Ranking> out;
  out.reserve(sheets.size());
  for (const auto& s : sheets) out.push_back(Ranking::from_sheet(s));
  return out;
}

}  // namespace

std::map<std::string, double> mean_ranks(std::span<const Ranking> rankings) {
  if (rankings.empty()) throw InputError("consensus needs at least one ranking");
  std::map<std::string, double> sums;
  for (const auto& [item, r] : rankings.front().ranks()) sums.emplace(item, 0.0);
  for (const auto& ranking : rankings) {
    if (ranking.size() != sums.size()) throw InputError("rankings cover different item sets");
    for (const auto& [item, r] : ranking.ranks()) {
      auto it = sums.find(item);
      if (it == sums.end()) throw InputError("rankings cover different item sets");
      it->second += r;
    }
  }
  for (auto& [item, s] : sums) s /= static_cast<double>(rankings.size());
  return sums;
}

Ranking group_mean_ranking(std::span<const Ranking> rankings) {
  return ranks_from_scores(mean_ranks(rankings), Direction::Ascending);
}

Ranking group_mean_ranking(std::span<const RankingSheet> sheets) {
  const auto rankings = to_rankings(sheets);
  return group_mean_ranking(rankings);
}

std::vector<ExpertAgreement> expert_agreement(std::span<const RankingSheet> sheets,
                                              const Ranking& consensus) {
  const auto items = consensus.items();
  const auto matrix = sheet_matrix(sheets, items);
  const auto target = consensus.values();
  const auto stats = kernels::agreement_rows(matrix, sheets.size(), target);
  std::vector<ExpertAgreement> out;
  out.reserve(sheets.size());
  for (std::size_t i = 0; i < sheets.size(); ++i) out.push_back({sheets[i].expert_id, stats[i]});
  return out;
}

std::string_view to_string(OutlierClass label) {
  switch (label) {
    case OutlierClass::Strong: return "strong";
    case OutlierClass::Neutral: return "neutral";
    case OutlierClass::Weak: return "weak";
  }
  return "neutral";
}

OutlierClass classify(double rho, const OutlierThresholds& thresholds) {
  if (rho > thresholds.strong) return OutlierClass::Strong;
  if (rho < thresholds.weak) return OutlierClass::Weak;
  return OutlierClass::Neutral;
}

std::vector<OutlierLabel> classify_outliers(std::span<const ExpertRho> rhos,
                                            const OutlierThresholds& thresholds) {
  if (thresholds.weak > thresholds.strong) {
    throw InputError("weak threshold exceeds strong threshold");
  }
  std::vector<OutlierLabel> out;
  out.reserve(rhos.size());
  for (const auto& r : rhos) out.push_back({r.expert_id, r.rho, classify(r.rho, thresholds)});
  return out;
}

AgreementMatrix agreement_matrix(std::span<const RankingSheet> sheets, const Ranking& consensus) {
  const auto items = consensus.items();
  const auto matrix = sheet_matrix(sheets, items);
  const std::size_t n = items.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto ranks = consensus.values();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });

  AgreementMatrix out;
  out.experts = sheets.size();
  for (std::size_t idx : order) {
    AgreementMatrix::Row row{items[idx], ranks[idx], std::vector<int>(n, 0)};
    for (std::size_t j = 0; j < sheets.size(); ++j) {
      const auto r = static_cast<std::size_t>(matrix[j * n + idx]);
      if (r < 1 || r > n) throw InputError("sheet rank outside 1..n");
      ++row.counts[r - 1];
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<ScatterPoint> scatter_distances(std::span<const RankingSheet> sheets,
                                            std::span<const Expert> experts,
                                            const Ranking& consensus, const Ranking& reference) {
  std::map<std::string, std::string> group_of;
  for (const auto& e : experts) group_of.emplace(e.id, e.group_id);
  std::vector<ScatterPoint> out;
  out.reserve(sheets.size());
  for (const auto& sheet : sheets) {
    const auto ranking = Ranking::from_sheet(sheet);
    auto g = group_of.find(sheet.expert_id);
    out.push_back({sheet.expert_id, g == group_of.end() ? std::string{} : g->second,
                   footrule(ranking, consensus), footrule(ranking, reference)});
  }
  return out;
}

std::vector<ScatterPoint> scatter_distances(std::span<const RankingSheet> sheets,
                                            std::span<const Expert> experts,
                                            const Ranking& consensus) {
  auto ref = std::find_if(experts.begin(), experts.end(), [](const Expert& e) { return e.is_reference; });
  if (ref == experts.end()) throw InputError("no reference expert is flagged");
  auto sheet = std::find_if(sheets.begin(), sheets.end(),
                            [&](const RankingSheet& s) { return s.expert_id == ref->id; });
  if (sheet == sheets.end()) throw InputError("reference expert '" + ref->id + "' has no ranking sheet");
  return scatter_distances(sheets, experts, consensus, Ranking::from_sheet(*sheet));
}

std::vector<MethodOutcome> method_comparison(const RankingSheet& actual,
                                             const ExpertHopRatings& ratings,
                                             const Scenario& scenario,
                                             std::span<const AggregationMethod> methods) {
  std::vector<MethodOutcome> out;
  out.reserve(methods.size());
  for (const auto& m : methods) out.push_back(compare_method(actual, ratings, scenario, m));
  return out;
}

MethodTable method_table(std::span<const RankingSheet> actual,
                         std::span<const ExpertHopRatings> ratings, const Scenario& scenario,
                         std::span<const AggregationMethod> methods) {
  if (actual.size() != ratings.size()) throw InputError("one rating set per ranking sheet required");
  MethodTable table;
  table.methods.assign(methods.begin(), methods.end());
  for (const auto& s : actual) table.expert_ids.push_back(s.expert_id);
  table.cells = kernels::method_cells(actual, ratings, scenario, methods);
  for (const auto& row : table.cells) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& cell : row) {
      if (cell.rho) {
        sum += *cell.rho;
        ++count;
      }
    }
    table.mean_rho.push_back(count ? std::optional<double>(sum / static_cast<double>(count))
                                   : std::nullopt);
  }
  return table;
}

GroupPartition groups_from_experts(std::span<const Expert> experts,
                                   std::span<const RankingSheet> sheets) {
  std::set<std::string> has_sheet;
  for (const auto& s : sheets) has_sheet.insert(s.expert_id);
  GroupPartition groups;
  for (const auto& e : experts) {
    if (has_sheet.contains(e.id)) groups[e.group_id].push_back(e.id);
  }
  return groups;
}

std::vector<GroupStats> group_vs_set(const GroupPartition& groups,
                                     std::span<const RankingSheet> sheets,
                                     const Ranking& set_consensus) {
  std::map<std::string, const RankingSheet*> by_expert;
  for (const auto& s : sheets) by_expert.emplace(s.expert_id, &s);

  std::set<std::string> assigned;
  std::vector<GroupStats> out;
  for (const auto& [group_id, members] : groups) {
    if (members.empty()) throw InputError("group '" + group_id + "' is empty");
    std::vector<RankingSheet> group_sheets;
    for (const auto& id : members) {
      if (!assigned.insert(id).second) throw InputError("expert '" + id + "' belongs to two groups");
      auto it = by_expert.find(id);
      if (it == by_expert.end()) throw InputError("expert '" + id + "' has no ranking sheet");
      group_sheets.push_back(*it->second);
    }

    GroupStats stats;
    stats.group_id = group_id;
    stats.size = members.size();
    stats.consensus = group_mean_ranking(group_sheets);
    stats.rho_vs_set = spearman_rho(stats.consensus, set_consensus);

    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& a : expert_agreement(group_sheets, stats.consensus)) {
      if (a.stats.rho) {
        sum += *a.stats.rho;
        ++defined;
      }
    }
    if (defined) stats.mean_rho = sum / static_cast<double>(defined);
    if (group_sheets.size() >= 2) {
      stats.kendall_w = kendall_w(to_rankings(group_sheets)).w;
    }
    out.push_back(std::move(stats));
  }
  return out;
}

}  // namespace elicit
