#pragma once

#include <string>
#include <vector>

#include "elicit/rank_stats.hpp"
#include "elicit/scenario.hpp"

namespace testing_helpers {

inline std::vector<std::string> letters(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

inline elicit::Ranking ranking(const std::vector<double>& ranks) {
  std::map<std::string, double> m;
  const auto items = letters(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) m.emplace(items[i], ranks[i]);
  return elicit::Ranking(std::move(m));
}

inline elicit::RankingSheet sheet(const std::string& expert, const std::vector<int>& ranks) {
  elicit::RankingSheet s{expert, {}};
  const auto items = letters(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) s.ranks.emplace(items[i], ranks[i]);
  return s;
}

inline std::vector<int> identity(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  return v;
}

inline std::vector<int> reversed(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = n - i;
  return v;
}

}  // namespace testing_helpers
