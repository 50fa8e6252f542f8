#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/rank_stats.hpp"
#include "elicit/scenario.hpp"

namespace elicit {

struct IntervalStats {
  double lo = 0.0;
  double mid = 0.0;
  double hi = 0.0;
};

IntervalStats interval_stats(double lo, double hi);
IntervalStats interval_stats(const IntervalResponse& response);

enum class OwaScheme { Linear, Geometric };

/// OWA weight vector; w[0] applies to the largest value.
class OwaWeights {
 public:
  /// Throws InputError unless non-empty, non-negative and summing to 1.
  explicit OwaWeights(std::vector<double> weights);

  std::span<const double> values() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

/// Linear: w_i = (n - i + 1) / (n(n+1)/2).
/// Geometric: w_i proportional to 2^-i, normalized over the actual n.
OwaWeights owa_weights(OwaScheme scheme, std::size_t n);

/// Sorts `values` descending and returns the weighted sum.
double owa(const OwaWeights& weights, std::span<const double> values);

enum class Operator { Sum, Min, Mean, Max, OwaLinear, OwaGeometric };
enum class Statistic { Min, Mid, Max };

struct AggregationMethod {
  Operator op = Operator::Mean;
  Statistic statistic = Statistic::Mid;

  bool operator==(const AggregationMethod&) const = default;
};

std::string_view to_string(Operator op);
std::string_view to_string(Statistic statistic);
/// "<operator>:<statistic>", e.g. "owa-linear:mid".
std::string to_string(const AggregationMethod& method);
/// Parses "<operator>:<statistic>"; throws InputError on unknown names.
AggregationMethod parse_method(std::string_view text);
/// Comma-separated list of methods.
std::vector<AggregationMethod> parse_methods(std::string_view text);
/// Every operator x statistic pair, operator-major.
std::vector<AggregationMethod> all_methods();

double select(const IntervalStats& stats, Statistic statistic);

/// Applies a plain operator to a non-empty list of hop values. OWA operators
/// generate weights for the list length.
double aggregate(Operator op, std::span<const double> values);

/// One expert's overall-question intervals, keyed by hop id.
struct ExpertHopRatings {
  std::string expert_id;
  std::map<std::string, IntervalStats> overall;
};

/// Collects `expert_id`'s overall-question responses. Throws InputError when
/// the scenario has no overall question.
ExpertHopRatings collect_overall(const Scenario& scenario, const std::string& expert_id,
                                 std::span<const IntervalResponse> responses);

/// Difficulty score of one attack vector: the statistic of every hop
/// occurrence, combined with the operator. Larger means harder.
double av_score(const AggregationMethod& method, const ExpertHopRatings& ratings,
                const AttackVector& av);

/// Scores every attack vector of the scenario.
std::map<std::string, double> av_scores(const AggregationMethod& method,
                                        const ExpertHopRatings& ratings, const Scenario& scenario);

/// Ranks attack vectors by ascending score: the lowest score is rank 1
/// (easiest). Ties share average ranks.
Ranking derive_ranking(const ExpertHopRatings& ratings, const Scenario& scenario,
                       const AggregationMethod& method);

/// Attack vectors whose score equals at least one other attack vector's score.
std::size_t count_tied(const std::map<std::string, double>& scores);

}  // namespace elicit
