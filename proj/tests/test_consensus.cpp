#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <set>

#include "elicit/consensus.hpp"
#include "elicit/error.hpp"
#include "elicit/random.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace elicit;
using namespace testing_helpers;
using Catch::Approx;

namespace {

// Base permutation with `swaps` random adjacent transpositions.
std::vector<int> perturbed(std::vector<int> base, int swaps, Rng& rng) {
  for (int k = 0; k < swaps; ++k) {
    const auto i = rng.below(base.size() - 1);
    std::swap(base[i], base[i + 1]);
  }
  return base;
}

RankingSheet sheet_of(const std::string& id, const std::vector<std::string>& items, const std::vector<int>& ranks) {
  RankingSheet s{id, {}};
  for (std::size_t i = 0; i < items.size(); ++i) s.ranks.emplace(items[i], ranks[i]);
  return s;
}

}  // namespace

TEST_CASE("group_mean_ranking examples", "[consensus]") {
  SECTION("identical sheets") {
    const std::vector<RankingSheet> sheets{sheet("x", {2, 1, 3}), sheet("y", {2, 1, 3})};
    CHECK(group_mean_ranking(sheets) == ranking({2, 1, 3}));
  }
  SECTION("opposite sheets tie everywhere") {
    const std::vector<RankingSheet> sheets{sheet("x", {1, 2, 3}), sheet("y", {3, 2, 1})};
    CHECK(group_mean_ranking(sheets) == ranking({2, 2, 2}));
  }
  SECTION("partial tie") {
    const std::vector<RankingSheet> sheets{sheet("x", {1, 2, 3}), sheet("y", {2, 1, 3})};
    CHECK(group_mean_ranking(sheets) == ranking({1.5, 1.5, 3}));
    const std::vector<Ranking> rankings{ranking({1, 2, 3}), ranking({2, 1, 3})};
    CHECK(mean_ranks(rankings) == std::map<std::string, double>{{"a", 1.5}, {"b", 1.5}, {"c", 3}});
  }
  SECTION("errors") {
    CHECK_THROWS_AS(group_mean_ranking(std::vector<RankingSheet>{}), InputError);
    const std::vector<RankingSheet> mixed{sheet("x", {1, 2, 3}), sheet("y", {1, 2})};
    CHECK_THROWS_AS(group_mean_ranking(mixed), InputError);
  }
}

TEST_CASE("group_mean_ranking invariants", "[consensus][property]") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    const auto sheets = random_rankings(1 + rng.below(6), n, rng.next());
    const auto consensus = group_mean_ranking(sheets);
    auto doubled = sheets;
    doubled.insert(doubled.end(), sheets.begin(), sheets.end());
    REQUIRE(group_mean_ranking(doubled) == consensus);
    REQUIRE(group_mean_ranking(std::span(sheets).first(1)) == Ranking::from_sheet(sheets[0]));
  }
}

TEST_CASE("adding the consensus as a sheet never lowers anyone's rho (exhaustive, n <= 5)",
          "[consensus][exhaustive]") {
  std::size_t cohorts = 0, checked = 0;
  const auto run = [&](int n, int m) {
    const auto perms = oracle::all_permutations(n);
    const auto items = letters(static_cast<std::size_t>(n));
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    while (true) {
      std::vector<RankingSheet> cohort;
      for (int j = 0; j < m; ++j) cohort.push_back(sheet_of("e" + std::to_string(j), items, perms[idx[j]]));
      const auto consensus = group_mean_ranking(cohort);
      const auto values = consensus.values();
      const bool tie_free = std::set<double>(values.begin(), values.end()).size() == values.size();
      if (tie_free) {
        ++cohorts;
        std::vector<int> as_ints;
        for (double v : values) as_ints.push_back(static_cast<int>(v));
        auto grown = cohort;
        grown.push_back(sheet_of("consensus", items, as_ints));
        const auto next = group_mean_ranking(grown);
        const auto before = expert_agreement(cohort, consensus);
        const auto after = expert_agreement(std::span(grown).first(cohort.size()), next);
        for (std::size_t e = 0; e < before.size(); ++e) {
          REQUIRE(*after[e].stats.rho >= *before[e].stats.rho - 1e-12);
          ++checked;
        }
      }
      int k = 0;
      while (k < m && ++idx[k] == perms.size()) idx[k++] = 0;
      if (k == m) break;
    }
  };
  for (int n = 2; n <= 4; ++n) {
    run(n, 2);
    run(n, 3);
  }
  run(5, 2);
  CHECK(cohorts > 0);
  CHECK(checked > 0);
}

TEST_CASE("expert_agreement", "[consensus]") {
  const auto base = identity(10);
  const std::vector<std::string> items = letters(10);
  SECTION("self-agreement") {
    const std::vector<RankingSheet> sheets{sheet("x", base)};
    const auto a = expert_agreement(sheets, ranking({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
    CHECK(*a[0].stats.rho == Approx(1.0).margin(1e-12));
    CHECK(a[0].stats.footrule == 0);
  }
  SECTION("reversal") {
    REQUIRE(oracle::footrule(base, reversed(10)) == 50);
    const std::vector<RankingSheet> sheets{sheet("x", reversed(10))};
    const auto a = expert_agreement(sheets, ranking({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
    CHECK(*a[0].stats.rho == Approx(-1.0).margin(1e-12));
    CHECK(a[0].stats.footrule == 50);
  }
  SECTION("concordant cohort agrees strongly with its consensus") {
    Rng rng(6);
    std::vector<RankingSheet> sheets;
    for (int e = 0; e < 6; ++e) sheets.push_back(sheet("e" + std::to_string(e), perturbed(base, 1, rng)));
    const auto consensus = group_mean_ranking(sheets);
    for (const auto& a : expert_agreement(sheets, consensus)) CHECK(*a.stats.rho >= 0.7);
  }
  SECTION("mismatched items") {
    const std::vector<RankingSheet> sheets{sheet("x", {1, 2})};
    CHECK_THROWS_AS(expert_agreement(sheets, ranking({1, 2, 3})), InputError);
  }
}

TEST_CASE("classify_outliers", "[consensus]") {
  const std::vector<ExpertRho> rhos{{"A.a", 0.9152}, {"E.a", 0.2121}, {"x", 0.5}, {"edge-hi", 0.7}, {"edge-lo", 0.3}};
  const auto labels = classify_outliers(rhos);
  REQUIRE(labels.size() == rhos.size());
  CHECK(labels[0].label == OutlierClass::Strong);
  CHECK(labels[1].label == OutlierClass::Weak);
  CHECK(labels[2].label == OutlierClass::Neutral);
  CHECK(labels[3].label == OutlierClass::Neutral);
  CHECK(labels[4].label == OutlierClass::Neutral);
  CHECK(classify(0.85, {0.9, 0.1}) == OutlierClass::Neutral);
  CHECK_THROWS_AS(classify_outliers(rhos, {0.2, 0.5}), InputError);
}

TEST_CASE("agreement_matrix", "[consensus]") {
  SECTION("single voter") {
    const std::vector<RankingSheet> sheets{sheet("x", {3, 1, 2})};
    const auto m = agreement_matrix(sheets, group_mean_ranking(sheets));
    REQUIRE(m.rows.size() == 3);
    CHECK(m.rows[0].av_id == "b");
    CHECK(m.rows[1].av_id == "c");
    CHECK(m.rows[2].av_id == "a");
    for (const auto& row : m.rows) CHECK(std::accumulate(row.counts.begin(), row.counts.end(), 0) == 1);
  }
  SECTION("perfect agreement is diagonal") {
    const std::vector<RankingSheet> sheets(4, sheet("x", {2, 3, 1, 4}));
    const auto m = agreement_matrix(sheets, group_mean_ranking(sheets));
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      for (std::size_t k = 0; k < 4; ++k) CHECK(m.rows[i].counts[k] == (i == k ? 4 : 0));
    }
  }
  SECTION("random sheets spread evenly") {
    const auto sheets = random_rankings(5000, 6, 77);
    const auto m = agreement_matrix(sheets, group_mean_ranking(sheets));
    for (const auto& row : m.rows) {
      REQUIRE(std::accumulate(row.counts.begin(), row.counts.end(), 0) == 5000);
      double chi2 = 0.0;
      const double expected = 5000.0 / 6.0;
      for (int c : row.counts) chi2 += (c - expected) * (c - expected) / expected;
      CHECK(chi2 < 20.52);  // 5 dof, p = 0.001
    }
  }
}

TEST_CASE("scatter_distances", "[consensus]") {
  const std::vector<Expert> experts{{"x", "G1", false}, {"ref", "G2", true}};
  const std::vector<RankingSheet> sheets{sheet("x", {1, 2, 3}), sheet("ref", {3, 2, 1})};
  const auto consensus = ranking({1, 2, 3});
  const auto points = scatter_distances(sheets, experts, consensus);
  REQUIRE(points.size() == 2);
  CHECK(points[0].expert_id == "x");
  CHECK(points[0].group_id == "G1");
  CHECK(points[0].d_consensus == 0);
  CHECK(points[0].d_reference == 4);
  CHECK(points[1].d_reference == 0);

  const std::vector<Expert> no_ref{{"x", "G1", false}, {"ref", "G2", false}};
  CHECK_THROWS_AS(scatter_distances(sheets, no_ref, consensus), InputError);
  const std::vector<Expert> ref_without_sheet{{"x", "G1", false}, {"z", "G2", true}};
  CHECK_THROWS_AS(scatter_distances(sheets, ref_without_sheet, consensus), InputError);
}

namespace {

Scenario hop_scenario() {
  Scenario s;
  s.id = "hops";
  s.questions = {{"overall", "Overall", true}};
  for (int h = 1; h <= 6; ++h) s.hops.push_back({"h" + std::to_string(h), "", ""});
  s.avs = {{"AV1", "", {"h1", "h2"}}, {"AV2", "", {"h2", "h3", "h2"}}, {"AV3", "", {"h4"}},
           {"AV4", "", {"h5", "h6"}}, {"AV5", "", {"h1", "h6", "h3"}}};
  return s;
}

// Expert whose elicited sheet is the order of their own (mean, mid) scores.
std::pair<RankingSheet, ExpertHopRatings> consistent_expert(const std::string& id, Rng& rng, const Scenario& s) {
  for (;;) {
    ExpertHopRatings r{id, {}};
    for (const auto& h : s.hops) {
      const double lo = rng.uniform(0, 80);
      r.overall[h.id] = interval_stats(lo, lo + rng.uniform(0, 20));
    }
    const auto scores = av_scores({Operator::Mean, Statistic::Mid}, r, s);
    if (count_tied(scores)) continue;
    std::vector<std::pair<double, std::string>> order;
    for (const auto& [av, sc] : scores) order.emplace_back(sc, av);
    std::sort(order.begin(), order.end());
    RankingSheet sheet{id, {}};
    for (std::size_t i = 0; i < order.size(); ++i) sheet.ranks[order[i].second] = static_cast<int>(i + 1);
    return {sheet, r};
  }
}

}  // namespace

TEST_CASE("method_comparison", "[consensus]") {
  const auto s = hop_scenario();
  Rng rng(8);
  const auto [sheet, ratings] = consistent_expert("D.x", rng, s);
  const auto methods = all_methods();

  SECTION("consistent-by-construction expert") {
    const auto out = method_comparison(sheet, ratings, s, methods);
    REQUIRE(out.size() == methods.size());
    const auto it = std::find_if(out.begin(), out.end(), [](const MethodOutcome& o) {
      return o.method == AggregationMethod{Operator::Mean, Statistic::Mid};
    });
    REQUIRE(it != out.end());
    CHECK(*it->rho == Approx(1.0).margin(1e-12));
  }
  SECTION("missing responses become per-method errors") {
    auto partial = ratings;
    partial.overall.erase("h3");
    const auto out = method_comparison(sheet, partial, s, methods);
    for (const auto& o : out) {
      CHECK_FALSE(o.rho.has_value());
      CHECK(o.error.find("h3") != std::string::npos);
    }
  }
  SECTION("cohort table reports each method side by side") {
    std::vector<RankingSheet> sheets;
    std::vector<ExpertHopRatings> all;
    for (int e = 0; e < 4; ++e) {
      auto [sh, r] = consistent_expert("D." + std::to_string(e), rng, s);
      // mild noise: one adjacent swap in the elicited sheet
      std::vector<std::pair<int, std::string>> by_rank;
      for (const auto& [av, rank] : sh.ranks) by_rank.emplace_back(rank, av);
      std::sort(by_rank.begin(), by_rank.end());
      const auto i = rng.below(by_rank.size() - 1);
      std::swap(sh.ranks[by_rank[i].second], sh.ranks[by_rank[i + 1].second]);
      sheets.push_back(sh);
      all.push_back(r);
    }
    const std::vector<AggregationMethod> chosen{{Operator::Mean, Statistic::Mid},
                                                {Operator::OwaLinear, Statistic::Mid},
                                                {Operator::OwaGeometric, Statistic::Mid}};
    const auto table = method_table(sheets, all, s, chosen);
    REQUIRE(table.cells.size() == 3);
    REQUIRE(table.expert_ids.size() == 4);
    for (std::size_t k = 0; k < 3; ++k) {
      REQUIRE(table.mean_rho[k].has_value());
      double sum = 0;
      for (const auto& c : table.cells[k]) sum += *c.rho;
      CHECK(*table.mean_rho[k] == Approx(sum / 4).margin(1e-12));
    }
    // a single adjacent swap over 5 items costs 1 - 6*2/120
    for (const auto& c : table.cells[0]) CHECK(*c.rho == Approx(0.9).margin(1e-12));
  }
}

TEST_CASE("group_vs_set", "[consensus]") {
  SECTION("one group equal to the set") {
    const std::vector<RankingSheet> sheets{sheet("x", {1, 2, 3, 4}), sheet("y", {2, 1, 3, 4}), sheet("z", {1, 3, 2, 4})};
    const auto set = group_mean_ranking(sheets);
    const auto stats = group_vs_set({{"all", {"x", "y", "z"}}}, sheets, set);
    REQUIRE(stats.size() == 1);
    CHECK(*stats[0].rho_vs_set == Approx(1.0).margin(1e-12));
    CHECK(stats[0].size == 3);
  }
  SECTION("group of identical sheets") {
    const std::vector<RankingSheet> sheets{sheet("x", {4, 2, 3, 1}), sheet("y", {4, 2, 3, 1}), sheet("z", {1, 2, 3, 4})};
    const auto set = group_mean_ranking(sheets);
    const auto stats = group_vs_set({{"same", {"x", "y"}}, {"solo", {"z"}}}, sheets, set);
    CHECK(*stats[0].kendall_w == Approx(1.0).margin(1e-12));
    CHECK(*stats[0].mean_rho == Approx(1.0).margin(1e-12));
    CHECK_FALSE(stats[1].kendall_w.has_value());
  }
  SECTION("tighter group has higher W") {
    Rng rng(12);
    const auto items = letters(10);
    const auto base = identity(10);
    std::vector<RankingSheet> sheets;
    GroupPartition groups;
    for (int e = 0; e < 5; ++e) {
      sheets.push_back(sheet_of("tight" + std::to_string(e), items, perturbed(base, 2, rng)));
      groups["D"].push_back(sheets.back().expert_id);
      sheets.push_back(sheet_of("loose" + std::to_string(e), items, perturbed(base, 40, rng)));
      groups["G"].push_back(sheets.back().expert_id);
    }
    const auto stats = group_vs_set(groups, sheets, group_mean_ranking(sheets));
    CHECK(*stats[0].kendall_w > *stats[1].kendall_w);
    CHECK(*stats[0].mean_rho > *stats[1].mean_rho);
  }
  SECTION("errors") {
    const std::vector<RankingSheet> sheets{sheet("x", {1, 2}), sheet("y", {2, 1})};
    const auto set = group_mean_ranking(sheets);
    CHECK_THROWS_AS(group_vs_set({{"empty", {}}}, sheets, set), InputError);
    CHECK_THROWS_AS(group_vs_set({{"a", {"x"}}, {"b", {"x"}}}, sheets, set), InputError);
    CHECK_THROWS_AS(group_vs_set({{"a", {"nobody"}}}, sheets, set), InputError);
  }
  SECTION("groups_from_experts skips experts without sheets") {
    const std::vector<Expert> experts{{"x", "A", false}, {"y", "B", false}, {"q", "B", false}};
    const std::vector<RankingSheet> sheets{sheet("x", {1, 2}), sheet("y", {2, 1})};
    const auto groups = groups_from_experts(experts, sheets);
    CHECK(groups == GroupPartition{{"A", {"x"}}, {"B", {"y"}}});
  }
}
