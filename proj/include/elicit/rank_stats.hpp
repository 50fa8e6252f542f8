#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elicit/scenario.hpp"

namespace elicit {

/// Real-valued ranking over named items. Tied items share the average of the
/// positions they span, so values lie in [1, n] and sum to n(n+1)/2.
class Ranking {
 public:
  Ranking() = default;
  /// Throws InputError when the values break the ranking invariants.
  explicit Ranking(std::map<std::string, double> ranks);

  static Ranking from_sheet(const RankingSheet& sheet);

  const std::map<std::string, double>& ranks() const noexcept { return ranks_; }
  double at(const std::string& item) const;
  std::size_t size() const noexcept { return ranks_.size(); }
  bool empty() const noexcept { return ranks_.empty(); }
  std::vector<std::string> items() const;
  /// Rank values in item-id order.
  std::vector<double> values() const;

  bool operator==(const Ranking&) const = default;

 private:
  std::map<std::string, double> ranks_;
};

enum class Direction { Ascending, Descending };

struct AgreementStats {
  std::optional<double> rho;  // empty when either ranking has zero variance
  double footrule = 0.0;
};

struct ConcordanceStat {
  double w = 0.0;
  std::size_t m = 0;  // rankings
  std::size_t n = 0;  // items
};

// Dense kernels. Vectors are aligned by position; callers own the alignment.

/// Average ranks of `scores`; ascending gives rank 1 to the lowest score.
std::vector<double> average_ranks(std::span<const double> scores,
                                  Direction direction = Direction::Ascending);

/// Pearson correlation of two rank vectors; empty on zero variance.
std::optional<double> spearman_rho(std::span<const double> a, std::span<const double> b);

/// Closed form 1 - 6 sum(d^2) / (n(n^2-1)); exact only for tie-free inputs.
double spearman_rho_closed_form(std::span<const double> a, std::span<const double> b);

double footrule(std::span<const double> a, std::span<const double> b);

/// Sum over tie groups of (t^3 - t) for one rank vector.
double tie_correction(std::span<const double> ranks);

/// Kendall's W over `m` rank vectors of length `n`, stored row-major.
ConcordanceStat kendall_w(std::span<const double> rank_matrix, std::size_t m, std::size_t n);

// Named-item wrappers. Mismatched item sets throw InputError.

Ranking ranks_from_scores(const std::map<std::string, double>& scores,
                          Direction direction = Direction::Ascending);
std::optional<double> spearman_rho(const Ranking& a, const Ranking& b);
double footrule(const Ranking& a, const Ranking& b);
ConcordanceStat kendall_w(std::span<const Ranking> rankings);
AgreementStats agreement(const Ranking& a, const Ranking& b);

/// Generic item ids "1".."n" used when a caller has no scenario at hand.
std::vector<std::string> numbered_items(std::size_t n);

/// `m` independent uniform permutations of 1..n over `items`. Deterministic
/// per seed on every platform (explicit Fisher-Yates over mt19937_64).
std::vector<RankingSheet> random_rankings(std::size_t m, std::span<const std::string> items,
                                          std::uint64_t seed);
std::vector<RankingSheet> random_rankings(std::size_t m, std::size_t n, std::uint64_t seed);

}  // namespace elicit
