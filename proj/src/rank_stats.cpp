#include "elicit/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "elicit/error.hpp"
#include "elicit/random.hpp"

namespace elicit {

namespace {

constexpr double kRankTolerance = 1e-9;

void require_same_items(const std::map<std::string, double>& a,
                        const std::map<std::string, double>& b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw InputError("rankings cover different item sets");
  }
}

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("rank vectors differ in length");
}

}  // namespace

Ranking::Ranking(std::map<std::string, double> ranks) : ranks_(std::move(ranks)) {
  const auto n = static_cast<double>(ranks_.size());
  double sum = 0.0;
  for (const auto& [item, r] : ranks_) {
    if (!std::isfinite(r) || r < 1.0 - kRankTolerance || r > n + kRankTolerance) {
      throw InputError("rank of '" + item + "' outside [1, n]");
    }
    sum += r;
  }
  if (std::abs(sum - n * (n + 1.0) / 2.0) > kRankTolerance * std::max(1.0, n * n)) {
    throw InputError("rank values do not sum to n(n+1)/2");
  }
}

Ranking Ranking::from_sheet(const RankingSheet& sheet) {
  std::map<std::string, double> ranks;
  for (const auto& [item, r] : sheet.ranks) ranks.emplace(item, static_cast<double>(r));
  return Ranking(std::move(ranks));
}

double Ranking::at(const std::string& item) const {
  auto it = ranks_.find(item);
  if (it == ranks_.end()) throw InputError("item '" + item + "' is not ranked");
  return it->second;
}

std::vector<std::string> Ranking::items() const {
  std::vector<std::string> out;
  out.reserve(ranks_.size());
  for (const auto& [item, r] : ranks_) out.push_back(item);
  return out;
}

std::vector<double> Ranking::values() const {
  std::vector<double> out;
  out.reserve(ranks_.size());
  for (const auto& [item, r] : ranks_) out.push_back(r);
  return out;
}

std::vector<double> average_ranks(std::span<const double> scores, Direction direction) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw InputError("non-finite score");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Direction::Ascending ? scores[a] < scores[b] : scores[a] > scores[b];
  });

  std::vector<double> ranks(scores.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
    // positions start+1 .. end share their mean
    const double shared = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = shared;
    start = end;
  }
  return ranks;
}

std::optional<double> spearman_rho(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  if (a.size() < 2) throw InputError("spearman_rho needs at least two items");
  const auto n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double spearman_rho_closed_form(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  if (a.size() < 2) throw InputError("spearman_rho needs at least two items");
  const auto n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double footrule(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total;
}

double tie_correction(std::span<const double> ranks) {
  std::vector<double> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  std::size_t start = 0;
  while (start < sorted.size()) {
    std::size_t end = start + 1;
    while (end < sorted.size() && sorted[end] == sorted[start]) ++end;
    const auto t = static_cast<double>(end - start);
    total += t * t * t - t;
    start = end;
  }
  return total;
}

ConcordanceStat kendall_w(std::span<const double> rank_matrix, std::size_t m, std::size_t n) {
  if (m < 2) throw InputError("kendall_w needs at least two rankings");
  if (n < 2) throw InputError("kendall_w needs at least two items");
  if (rank_matrix.size() != m * n) throw InputError("rank matrix size is not m x n");

  std::vector<double> sums(n, 0.0);
  double ties = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto row = rank_matrix.subspan(j * n, n);
    for (std::size_t i = 0; i < n; ++i) sums[i] += row[i];
    ties += tie_correction(row);
  }
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(n);
  double s = 0.0;
  for (double r : sums) s += (r - mean) * (r - mean);

  const auto md = static_cast<double>(m);
  const auto nd = static_cast<double>(n);
  const double denominator = md * md * (nd * nd * nd - nd) - md * ties;
  if (denominator <= 0.0) throw InputError("kendall_w undefined: every ranking is fully tied");
  return {std::clamp(12.0 * s / denominator, 0.0, 1.0), m, n};
}

Ranking ranks_from_scores(const std::map<std::string, double>& scores, Direction direction) {
  if (scores.empty()) throw InputError("ranks_from_scores needs at least one score");
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& [item, s] : scores) values.push_back(s);
  const auto ranks = average_ranks(values, direction);
  std::map<std::string, double> out;
  std::size_t i = 0;
  for (const auto& [item, s] : scores) out.emplace_hint(out.end(), item, ranks[i++]);
  return Ranking(std::move(out));
}

std::optional<double> spearman_rho(const Ranking& a, const Ranking& b) {
  require_same_items(a.ranks(), b.ranks());
  return spearman_rho(a.values(), b.values());
}

double footrule(const Ranking& a, const Ranking& b) {
  require_same_items(a.ranks(), b.ranks());
  return footrule(a.values(), b.values());
}

AgreementStats agreement(const Ranking& a, const Ranking& b) {
  require_same_items(a.ranks(), b.ranks());
  const auto va = a.values();
  const auto vb = b.values();
  return {spearman_rho(va, vb), footrule(va, vb)};
}

ConcordanceStat kendall_w(std::span<const Ranking> rankings) {
  if (rankings.size() < 2) throw InputError("kendall_w needs at least two rankings");
  const std::size_t n = rankings.front().size();
  std::vector<double> matrix;
  matrix.reserve(rankings.size() * n);
  for (const auto& r : rankings) {
    require_same_items(rankings.front().ranks(), r.ranks());
    for (const auto& [item, v] : r.ranks()) matrix.push_back(v);
  }
  return kendall_w(matrix, rankings.size(), n);
}

std::vector<std::string> numbered_items(std::size_t n) {
  std::vector<std::string> items;
  items.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) items.push_back(std::to_string(i));
  return items;
}

std::vector<RankingSheet> random_rankings(std::size_t m, std::span<const std::string> items,
                                          std::uint64_t seed) {
  if (m == 0) throw InputError("random_rankings needs m >= 1");
  if (items.empty()) throw InputError("random_rankings needs n >= 1");
  if (std::set<std::string>(items.begin(), items.end()).size() != items.size()) {
    throw InputError("random_rankings items are not unique");
  }
  Rng rng(seed);
  std::vector<double> perm(items.size());
  std::vector<RankingSheet> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    rng.permutation(perm);
    RankingSheet sheet{"random-" + std::to_string(k + 1), {}};
    for (std::size_t i = 0; i < items.size(); ++i) {
      sheet.ranks.emplace(items[i], static_cast<int>(perm[i]));
    }
    out.push_back(std::move(sheet));
  }
  return out;
}

std::vector<RankingSheet> random_rankings(std::size_t m, std::size_t n, std::uint64_t seed) {
  const auto items = numbered_items(n);
  return random_rankings(m, items, seed);
}

}  // namespace elicit
