#include "elicit/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "elicit/error.hpp"
#include "elicit/kernels.hpp"

namespace elicit {

using nlohmann::json;

namespace {

template <typename Fn>
void run_section(SectionStatus& status, Fn&& fn) {
  try {
    fn();
    status = {};
  } catch (const std::exception& e) {
    status = {false, e.what()};
  }
}

void mark_unavailable(std::initializer_list<SectionStatus*> sections, const std::string& reason) {
  for (auto* s : sections) *s = {false, reason};
}

BaselineSummary compute_baseline(const std::vector<std::string>& items, std::size_t m,
                                 std::size_t trials, std::uint64_t seed) {
  BaselineSummary b;
  b.m = m;
  b.n = items.size();
  b.trials = trials;

  const auto cohort = random_rankings(m, items, seed);
  const auto consensus = group_mean_ranking(cohort);
  b.cohort = expert_agreement(cohort, consensus);
  std::vector<Ranking> rankings;
  for (const auto& s : cohort) rankings.push_back(Ranking::from_sheet(s));
  b.cohort_w = kendall_w(rankings).w;

  if (trials > 0) {
    const auto ws = kernels::baseline_w(m, items.size(), trials, seed);
    const double mean = std::accumulate(ws.begin(), ws.end(), 0.0) / static_cast<double>(ws.size());
    double ss = 0.0;
    for (double w : ws) ss += (w - mean) * (w - mean);
    b.mean_w = mean;
    b.sd_w = ws.size() > 1 ? std::sqrt(ss / static_cast<double>(ws.size() - 1)) : 0.0;
    auto [lo, hi] = std::minmax_element(ws.begin(), ws.end());
    b.min_w = *lo;
    b.max_w = *hi;
  }
  return b;
}

}  // namespace

AnalysisReport run_report(const Dataset& dataset, const ReportConfig& config) {
  AnalysisReport r;
  r.dataset_hash = dataset_hash(dataset);
  r.seed = config.seed;
  r.expert_count = dataset.experts.size();
  r.av_count = dataset.scenario.avs.size();
  r.thresholds = config.thresholds;
  for (const auto& e : dataset.experts) r.expert_groups.emplace(e.id, e.group_id);
  const auto& sheets = dataset.rankings;

  if (sheets.empty()) {
    mark_unavailable({&r.consensus_status, &r.agreement_status, &r.outlier_status, &r.group_status,
                      &r.matrix_status, &r.scatter_status},
                     "no ranking sheets");
  } else {
    run_section(r.consensus_status, [&] {
      std::vector<Ranking> rankings;
      for (const auto& s : sheets) rankings.push_back(Ranking::from_sheet(s));
      r.mean_ranks = mean_ranks(rankings);
      r.consensus = ranks_from_scores(r.mean_ranks, Direction::Ascending);
      if (rankings.size() >= 2) r.set_kendall_w = kendall_w(rankings).w;
    });
    if (!r.consensus_status.available) {
      mark_unavailable({&r.agreement_status, &r.outlier_status, &r.group_status, &r.matrix_status,
                        &r.scatter_status},
                       "consensus unavailable: " + r.consensus_status.reason);
    } else {
      run_section(r.agreement_status, [&] { r.expert_agreement = expert_agreement(sheets, r.consensus); });
      run_section(r.outlier_status, [&] {
        if (!r.agreement_status.available) throw InputError("agreement unavailable");
        std::vector<ExpertRho> rhos;
        for (const auto& a : r.expert_agreement) {
          if (a.stats.rho) rhos.push_back({a.expert_id, *a.stats.rho});
        }
        r.outliers = classify_outliers(rhos, config.thresholds);
      });
      const auto partition = groups_from_experts(dataset.experts, sheets);
      run_section(r.group_status, [&] { r.groups = group_vs_set(partition, sheets, r.consensus); });
      run_section(r.matrix_status, [&] {
        r.matrices["set"] = agreement_matrix(sheets, r.consensus);
        for (const auto& [group_id, members] : partition) {
          std::vector<RankingSheet> group_sheets;
          for (const auto& id : members) group_sheets.push_back(*dataset.find_sheet(id));
          r.matrices["group:" + group_id] =
              agreement_matrix(group_sheets, group_mean_ranking(group_sheets));
        }
      });
      run_section(r.scatter_status,
                  [&] { r.scatter = scatter_distances(sheets, dataset.experts, r.consensus); });
    }
  }

  run_section(r.method_status, [&] {
    if (dataset.responses.empty()) throw InputError("no interval responses");
    std::vector<RankingSheet> actual;
    std::vector<ExpertHopRatings> ratings;
    for (const auto& e : dataset.experts) {
      if (!config.hop_group.empty() && e.group_id != config.hop_group) continue;
      const auto* sheet = dataset.find_sheet(e.id);
      if (!sheet) continue;
      auto hop_ratings = collect_overall(dataset.scenario, e.id, dataset.responses);
      if (hop_ratings.overall.empty()) continue;
      actual.push_back(*sheet);
      ratings.push_back(std::move(hop_ratings));
    }
    if (actual.empty()) throw InputError("no expert has both a ranking sheet and overall responses");
    r.methods = method_table(actual, ratings, dataset.scenario, config.methods);
  });

  run_section(r.baseline_status, [&] {
    const auto items = dataset.scenario.av_ids();
    const std::size_t m = std::max<std::size_t>(2, sheets.size());
    r.baseline = compute_baseline(items, m, config.baseline_trials, config.seed);
  });
  return r;
}

namespace {

std::string num(double v) { return fmt::format("{}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }
std::string fixed(const std::optional<double>& v, int digits = 3) {
  return v ? fmt::format("{:.{}f}", *v, digits) : "n/a";
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

class CsvTable {
 public:
  CsvTable(const AnalysisReport& report, const SectionStatus& status)
      : text_(fmt::format("# dataset_sha256={} seed={}\n", report.dataset_hash, report.seed)),
        available_(status.available) {
    if (!available_) text_ += "# unavailable: " + status.reason + "\n";
  }
  bool available() const { return available_; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
  bool available_;
};

std::map<std::string, std::string> group_lookup(const AnalysisReport& r) {
  return r.expert_groups;
}

json status_json(const SectionStatus& s) {
  json j{{"available", s.available}};
  if (!s.available) j["reason"] = s.reason;
  return j;
}

json report_json(const AnalysisReport& r) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "analysis-report";
  doc["dataset_sha256"] = r.dataset_hash;
  doc["seed"] = r.seed;
  doc["experts"] = r.expert_count;
  doc["attack_vectors"] = r.av_count;

  json consensus = {{"status", status_json(r.consensus_status)}};
  consensus["kendall_w"] = opt_json(r.set_kendall_w);
  consensus["ranks"] = json::object();
  for (const auto& [av, rank] : r.consensus.ranks()) {
    consensus["ranks"][av] = {{"mean_rank", r.mean_ranks.at(av)}, {"rank", rank}};
  }
  doc["consensus"] = consensus;

  json agreement = json::array();
  for (const auto& a : r.expert_agreement) {
    agreement.push_back({{"expert_id", a.expert_id}, {"rho", opt_json(a.stats.rho)}, {"footrule", a.stats.footrule}});
  }
  doc["expert_agreement"] = {{"status", status_json(r.agreement_status)}, {"rows", agreement}};

  json outliers = json::array();
  for (const auto& o : r.outliers) {
    outliers.push_back({{"expert_id", o.expert_id}, {"rho", o.rho}, {"label", to_string(o.label)}});
  }
  doc["outliers"] = {{"status", status_json(r.outlier_status)},
                     {"thresholds", {{"strong", r.thresholds.strong}, {"weak", r.thresholds.weak}}},
                     {"rows", outliers}};

  json groups = json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"group_id", g.group_id},
                      {"size", g.size},
                      {"mean_rho", opt_json(g.mean_rho)},
                      {"kendall_w", opt_json(g.kendall_w)},
                      {"rho_vs_set", opt_json(g.rho_vs_set)}});
  }
  doc["groups"] = {{"status", status_json(r.group_status)}, {"rows", groups}};

  json matrices = json::object();
  for (const auto& [scope, m] : r.matrices) {
    json rows = json::array();
    for (const auto& row : m.rows) {
      rows.push_back({{"av_id", row.av_id}, {"consensus_rank", row.consensus_rank}, {"counts", row.counts}});
    }
    matrices[scope] = {{"experts", m.experts}, {"rows", rows}};
  }
  doc["agreement_matrices"] = {{"status", status_json(r.matrix_status)}, {"scopes", matrices}};

  json scatter = json::array();
  for (const auto& p : r.scatter) {
    scatter.push_back({{"expert_id", p.expert_id},
                       {"group_id", p.group_id},
                       {"d_consensus", p.d_consensus},
                       {"d_reference", p.d_reference}});
  }
  doc["scatter"] = {{"status", status_json(r.scatter_status)}, {"rows", scatter}};

  json methods = json::array();
  for (std::size_t k = 0; k < r.methods.methods.size(); ++k) {
    json cells = json::object();
    for (std::size_t e = 0; e < r.methods.expert_ids.size(); ++e) {
      const auto& cell = r.methods.cells[k][e];
      json c{{"rho", opt_json(cell.rho)}};
      if (!cell.error.empty()) c["error"] = cell.error;
      cells[r.methods.expert_ids[e]] = c;
    }
    methods.push_back({{"method", to_string(r.methods.methods[k])},
                       {"experts", cells},
                       {"mean_rho", opt_json(r.methods.mean_rho[k])}});
  }
  doc["method_comparison"] = {{"status", status_json(r.method_status)}, {"rows", methods}};

  json cohort = json::array();
  for (const auto& a : r.baseline.cohort) {
    cohort.push_back({{"expert_id", a.expert_id}, {"rho", opt_json(a.stats.rho)}, {"footrule", a.stats.footrule}});
  }
  doc["baseline"] = {{"status", status_json(r.baseline_status)},
                     {"m", r.baseline.m},
                     {"n", r.baseline.n},
                     {"trials", r.baseline.trials},
                     {"cohort", cohort},
                     {"cohort_kendall_w", r.baseline.cohort_w},
                     {"mean_w", r.baseline.mean_w},
                     {"sd_w", r.baseline.sd_w},
                     {"min_w", r.baseline.min_w},
                     {"max_w", r.baseline.max_w}};
  return doc;
}

std::string summary_markdown(const AnalysisReport& r) {
  std::string md = "# Expert elicitation analysis\n\n";
  md += fmt::format("- dataset sha256: `{}`\n- seed: {}\n- experts: {}\n- attack vectors: {}\n\n",
                    r.dataset_hash, r.seed, r.expert_count, r.av_count);
  const auto section = [&](const char* title, const SectionStatus& s) {
    md += fmt::format("## {}\n\n", title);
    if (!s.available) md += fmt::format("_Unavailable: {}_\n\n", s.reason);
    return s.available;
  };

  if (section("Consensus ranking", r.consensus_status)) {
    md += fmt::format("Kendall's W over all experts: {}\n\n", fixed(r.set_kendall_w));
    md += "| rank | attack vector | mean rank |\n|---:|---|---:|\n";
    std::vector<std::pair<double, std::string>> order;
    for (const auto& [av, rank] : r.consensus.ranks()) order.emplace_back(rank, av);
    std::sort(order.begin(), order.end());
    for (const auto& [rank, av] : order) {
      md += fmt::format("| {} | {} | {:.3f} |\n", num(rank), av, r.mean_ranks.at(av));
    }
    md += "\n";
  }
  if (section("Individuals vs consensus", r.agreement_status)) {
    md += "| expert | footrule | rho | label |\n|---|---:|---:|---|\n";
    std::map<std::string, std::string> labels;
    for (const auto& o : r.outliers) labels.emplace(o.expert_id, std::string(to_string(o.label)));
    for (const auto& a : r.expert_agreement) {
      md += fmt::format("| {} | {} | {} | {} |\n", a.expert_id, num(a.stats.footrule), fixed(a.stats.rho, 4),
                        labels.contains(a.expert_id) ? labels.at(a.expert_id) : "-");
    }
    md += "\n";
  }
  if (section("Outliers", r.outlier_status)) {
    std::size_t weak = 0, strong = 0;
    for (const auto& o : r.outliers) {
      weak += o.label == OutlierClass::Weak;
      strong += o.label == OutlierClass::Strong;
    }
    md += fmt::format("{} strong (rho > {}), {} weak (rho < {}) of {} experts.\n\n", strong,
                      r.thresholds.strong, weak, r.thresholds.weak, r.outliers.size());
  }
  if (section("Groups", r.group_status)) {
    md += "| group | size | mean rho | Kendall's W | rho vs set |\n|---|---:|---:|---:|---:|\n";
    for (const auto& g : r.groups) {
      md += fmt::format("| {} | {} | {} | {} | {} |\n", g.group_id, g.size, fixed(g.mean_rho),
                        fixed(g.kendall_w), fixed(g.rho_vs_set));
    }
    md += "\n";
  }
  if (section("Agreement matrices", r.matrix_status)) {
    md += fmt::format("{} scopes written to agreement_matrix.csv.\n\n", r.matrices.size());
  }
  if (section("Distance from consensus and reference", r.scatter_status)) {
    md += fmt::format("{} points written to scatter.csv.\n\n", r.scatter.size());
  }
  if (section("Hop-derived rankings vs elicited rankings", r.method_status)) {
    md += "| method |";
    for (const auto& id : r.methods.expert_ids) md += " " + id + " |";
    md += " mean |\n|---|";
    for (std::size_t i = 0; i <= r.methods.expert_ids.size(); ++i) md += "---:|";
    md += "\n";
    for (std::size_t k = 0; k < r.methods.methods.size(); ++k) {
      md += "| " + to_string(r.methods.methods[k]) + " |";
      for (const auto& cell : r.methods.cells[k]) md += " " + fixed(cell.rho) + " |";
      md += " " + fixed(r.methods.mean_rho[k]) + " |\n";
    }
    md += "\n";
  }
  if (section("Random-ranking baseline", r.baseline_status)) {
    md += fmt::format(
        "One random cohort (m={}, n={}): W = {:.3f}. Over {} seeded cohorts: mean W = {:.4f} "
        "(sd {:.4f}, range {:.4f} to {:.4f}).\n",
        r.baseline.m, r.baseline.n, r.baseline.cohort_w, r.baseline.trials, r.baseline.mean_w,
        r.baseline.sd_w, r.baseline.min_w, r.baseline.max_w);
  }
  return md;
}

}  // namespace

std::map<std::string, std::string> render_report(const AnalysisReport& r) {
  std::map<std::string, std::string> files;
  const auto groups = group_lookup(r);
  const auto group_of = [&](const std::string& id) {
    auto it = groups.find(id);
    return it == groups.end() ? std::string{} : it->second;
  };

  {
    CsvTable t(r, r.consensus_status);
    if (t.available()) {
      t.row({"av_id", "mean_rank", "consensus_rank"});
      for (const auto& [av, rank] : r.consensus.ranks()) t.row({av, num(r.mean_ranks.at(av)), num(rank)});
    }
    files["consensus.csv"] = t.str();
  }
  {
    CsvTable t(r, r.agreement_status);
    if (t.available()) {
      t.row({"expert_id", "group_id", "footrule", "rho"});
      for (const auto& a : r.expert_agreement) {
        t.row({a.expert_id, group_of(a.expert_id), num(a.stats.footrule), num(a.stats.rho)});
      }
    }
    files["expert_agreement.csv"] = t.str();
  }
  {
    CsvTable t(r, r.outlier_status);
    if (t.available()) {
      t.row({"expert_id", "group_id", "rho", "label"});
      for (const auto& o : r.outliers) {
        t.row({o.expert_id, group_of(o.expert_id), num(o.rho), std::string(to_string(o.label))});
      }
    }
    files["outliers.csv"] = t.str();
  }
  {
    CsvTable t(r, r.group_status);
    if (t.available()) {
      t.row({"group_id", "size", "mean_rho", "kendall_w", "rho_vs_set"});
      for (const auto& g : r.groups) {
        t.row({g.group_id, std::to_string(g.size), num(g.mean_rho), num(g.kendall_w), num(g.rho_vs_set)});
      }
    }
    files["group_agreement.csv"] = t.str();
  }
  {
    CsvTable t(r, r.matrix_status);
    if (t.available()) {
      std::vector<std::string> header{"scope", "av_id", "consensus_rank"};
      for (std::size_t k = 1; k <= r.av_count; ++k) header.push_back("rank_" + std::to_string(k));
      t.row(header);
      for (const auto& [scope, m] : r.matrices) {
        for (const auto& row : m.rows) {
          std::vector<std::string> cells{scope, row.av_id, num(row.consensus_rank)};
          for (int c : row.counts) cells.push_back(std::to_string(c));
          t.row(cells);
        }
      }
    }
    files["agreement_matrix.csv"] = t.str();
  }
  {
    CsvTable t(r, r.scatter_status);
    if (t.available()) {
      t.row({"expert_id", "group_id", "d_consensus", "d_reference"});
      for (const auto& p : r.scatter) t.row({p.expert_id, p.group_id, num(p.d_consensus), num(p.d_reference)});
    }
    files["scatter.csv"] = t.str();
  }
  {
    CsvTable t(r, r.method_status);
    if (t.available()) {
      std::vector<std::string> header{"method"};
      header.insert(header.end(), r.methods.expert_ids.begin(), r.methods.expert_ids.end());
      header.push_back("mean");
      t.row(header);
      for (std::size_t k = 0; k < r.methods.methods.size(); ++k) {
        std::vector<std::string> cells{to_string(r.methods.methods[k])};
        for (const auto& cell : r.methods.cells[k]) cells.push_back(num(cell.rho));
        cells.push_back(num(r.methods.mean_rho[k]));
        t.row(cells);
      }
    }
    files["method_comparison.csv"] = t.str();
  }
  {
    CsvTable t(r, r.baseline_status);
    if (t.available()) {
      t.row({"expert_id", "footrule", "rho"});
      for (const auto& a : r.baseline.cohort) t.row({a.expert_id, num(a.stats.footrule), num(a.stats.rho)});
    }
    files["baseline_cohort.csv"] = t.str();

    CsvTable s(r, r.baseline_status);
    if (s.available()) {
      s.row({"statistic", "value"});
      s.row({"m", std::to_string(r.baseline.m)});
      s.row({"n", std::to_string(r.baseline.n)});
      s.row({"cohort_kendall_w", num(r.baseline.cohort_w)});
      s.row({"trials", std::to_string(r.baseline.trials)});
      s.row({"mean_w", num(r.baseline.mean_w)});
      s.row({"sd_w", num(r.baseline.sd_w)});
      s.row({"min_w", num(r.baseline.min_w)});
      s.row({"max_w", num(r.baseline.max_w)});
    }
    files["baseline_trials.csv"] = s.str();
  }
  files["report.json"] = report_json(r).dump(2) + "\n";
  files["summary.md"] = summary_markdown(r);
  return files;
}

void write_report(const AnalysisReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DatasetIoError(dir.string() + ": " + ec.message());
  for (const auto& [name, content] : render_report(report)) write_text_file(dir / name, content);
}

}  // namespace elicit
