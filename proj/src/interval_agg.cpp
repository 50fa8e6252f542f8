#include "elicit/interval_agg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>

#include "elicit/error.hpp"

namespace elicit {

IntervalStats interval_stats(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw InputError("invalid interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return {lo, (lo + hi) / 2.0, hi};
}

IntervalStats interval_stats(const IntervalResponse& response) {
  return interval_stats(response.lo, response.hi);
}

OwaWeights::OwaWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("OWA weights must not be empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw InputError("OWA weights must be finite and non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("OWA weights must sum to 1");
}

OwaWeights owa_weights(OwaScheme scheme, std::size_t n) {
  if (n == 0) throw InputError("OWA weights need n >= 1");
  std::vector<double> w(n);
  if (scheme == OwaScheme::Linear) {
    const double total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(n - i) / total;
  } else {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += std::ldexp(1.0, -static_cast<int>(i + 1));
    for (std::size_t i = 0; i < n; ++i) w[i] = std::ldexp(1.0, -static_cast<int>(i + 1)) / total;
  }
  return OwaWeights(std::move(w));
}

double owa(const OwaWeights& weights, std::span<const double> values) {
  if (weights.size() != values.size()) {
    throw InputError("OWA needs one weight per value (" + std::to_string(weights.size()) + " vs " +
                     std::to_string(values.size()) + ")");
  }
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw InputError("OWA values must be finite");
  }
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) total += weights[i] * sorted[i];
  // rounding in the weights must not push the result outside the value range
  return std::clamp(total, sorted.back(), sorted.front());
}

namespace {

constexpr std::array<std::pair<Operator, std::string_view>, 6> kOperatorNames{{
    {Operator::Sum, "sum"},
    {Operator::Min, "min"},
    {Operator::Mean, "mean"},
    {Operator::Max, "max"},
    {Operator::OwaLinear, "owa-linear"},
    {Operator::OwaGeometric, "owa-geometric"},
}};

constexpr std::array<std::pair<Statistic, std::string_view>, 3> kStatisticNames{{
    {Statistic::Min, "min"},
    {Statistic::Mid, "mid"},
    {Statistic::Max, "max"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Operator op) {
  for (const auto& [value, name] : kOperatorNames) {
    if (value == op) return name;
  }
  return "?";
}

std::string_view to_string(Statistic statistic) {
  for (const auto& [value, name] : kStatisticNames) {
    if (value == statistic) return name;
  }
  return "?";
}

std::string to_string(const AggregationMethod& method) {
  return std::string(to_string(method.op)) + ":" + std::string(to_string(method.statistic));
}

AggregationMethod parse_method(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InputError("method '" + std::string(text) + "' is not of the form <operator>:<statistic>");
  }
  const auto op_name = trim(text.substr(0, colon));
  auto stat_name = trim(text.substr(colon + 1));
  if (stat_name == "mean") stat_name = "mid";  // an interval's mean is its midpoint

  AggregationMethod method;
  auto op = std::find_if(kOperatorNames.begin(), kOperatorNames.end(),
                         [&](const auto& p) { return p.second == op_name; });
  if (op == kOperatorNames.end()) throw InputError("unknown operator '" + std::string(op_name) + "'");
  auto stat = std::find_if(kStatisticNames.begin(), kStatisticNames.end(),
                           [&](const auto& p) { return p.second == stat_name; });
  if (stat == kStatisticNames.end()) {
    throw InputError("unknown interval statistic '" + std::string(stat_name) + "'");
  }
  method.op = op->first;
  method.statistic = stat->first;
  return method;
}

std::vector<AggregationMethod> parse_methods(std::string_view text) {
  std::vector<AggregationMethod> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto part = trim(text.substr(0, comma));
    if (!part.empty()) out.push_back(parse_method(part));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InputError("empty method list");
  return out;
}

std::vector<AggregationMethod> all_methods() {
  std::vector<AggregationMethod> out;
  for (const auto& [op, op_name] : kOperatorNames) {
    for (const auto& [stat, stat_name] : kStatisticNames) out.push_back({op, stat});
  }
  return out;
}

double select(const IntervalStats& stats, Statistic statistic) {
  switch (statistic) {
    case Statistic::Min: return stats.lo;
    case Statistic::Mid: return stats.mid;
    case Statistic::Max: return stats.hi;
  }
  return stats.mid;
}

double aggregate(Operator op, std::span<const double> values) {
  if (values.empty()) throw InputError("cannot aggregate an empty hop list");
  switch (op) {
    case Operator::Sum:
      return std::accumulate(values.begin(), values.end(), 0.0);
    case Operator::Min:
      return *std::min_element(values.begin(), values.end());
    case Operator::Max:
      return *std::max_element(values.begin(), values.end());
    case Operator::Mean:
      return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    case Operator::OwaLinear:
      return owa(owa_weights(OwaScheme::Linear, values.size()), values);
    case Operator::OwaGeometric:
      return owa(owa_weights(OwaScheme::Geometric, values.size()), values);
  }
  throw InputError("unknown operator");
}

ExpertHopRatings collect_overall(const Scenario& scenario, const std::string& expert_id,
                                 std::span<const IntervalResponse> responses) {
  const Question* overall = scenario.overall_question();
  if (!overall) throw InputError("scenario '" + scenario.id + "' has no overall question");
  ExpertHopRatings ratings{expert_id, {}};
  for (const auto& r : responses) {
    if (r.expert_id == expert_id && r.question_id == overall->id) {
      ratings.overall.emplace(r.hop_id, interval_stats(r));
    }
  }
  return ratings;
}

double av_score(const AggregationMethod& method, const ExpertHopRatings& ratings,
                const AttackVector& av) {
  if (av.hop_path.empty()) throw InputError("attack vector '" + av.id + "' has no hops");
  std::vector<double> values;
  values.reserve(av.hop_path.size());
  for (const auto& hop : av.hop_path) {
    auto it = ratings.overall.find(hop);
    if (it == ratings.overall.end()) throw MissingResponseError(ratings.expert_id, av.id, hop);
    values.push_back(select(it->second, method.statistic));
  }
  return aggregate(method.op, values);
}

std::map<std::string, double> av_scores(const AggregationMethod& method,
                                        const ExpertHopRatings& ratings, const Scenario& scenario) {
  std::map<std::string, double> scores;
  for (const auto& av : scenario.avs) scores.emplace(av.id, av_score(method, ratings, av));
  return scores;
}

Ranking derive_ranking(const ExpertHopRatings& ratings, const Scenario& scenario,
                       const AggregationMethod& method) {
  return ranks_from_scores(av_scores(method, ratings, scenario), Direction::Ascending);
}

std::size_t count_tied(const std::map<std::string, double>& scores) {
  std::map<double, std::size_t> counts;
  for (const auto& [item, s] : scores) ++counts[s];
  std::size_t tied = 0;
  for (const auto& [s, c] : counts) {
    if (c > 1) tied += c;
  }
  return tied;
}

}  // namespace elicit
