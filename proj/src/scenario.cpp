#include "elicit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace elicit {

const Question* Scenario::overall_question() const {
  auto it = std::find_if(questions.begin(), questions.end(),
                         [](const Question& q) { return q.is_overall; });
  return it == questions.end() ? nullptr : &*it;
}

const Hop* Scenario::find_hop(const std::string& hop_id) const {
  auto it = std::find_if(hops.begin(), hops.end(), [&](const Hop& h) { return h.id == hop_id; });
  return it == hops.end() ? nullptr : &*it;
}

const AttackVector* Scenario::find_av(const std::string& av_id) const {
  auto it = std::find_if(avs.begin(), avs.end(), [&](const AttackVector& a) { return a.id == av_id; });
  return it == avs.end() ? nullptr : &*it;
}

std::vector<std::string> Scenario::av_ids() const {
  std::vector<std::string> ids;
  ids.reserve(avs.size());
  for (const auto& av : avs) ids.push_back(av.id);
  return ids;
}

bool is_permutation_of(const std::map<std::string, int>& ranks,
                       std::span<const std::string> items) {
  if (ranks.size() != items.size()) return false;
  const int n = static_cast<int>(items.size());
  std::vector<bool> seen(items.size() + 1, false);
  for (const auto& item : items) {
    auto it = ranks.find(item);
    if (it == ranks.end()) return false;
    const int r = it->second;
    if (r < 1 || r > n || seen[r]) return false;
    seen[r] = true;
  }
  return true;
}

std::string to_string(const Violation& v) { return v.path + ": " + v.message; }

namespace {

class Collector {
 public:
  void add(std::string path, std::string message) {
    report_.push_back({std::move(path), std::move(message)});
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

std::string indexed(std::string_view name, std::size_t i) {
  return std::string(name) + "[" + std::to_string(i) + "]";
}

void check_scenario(const Scenario& s, Collector& out) {
  if (s.id.empty()) out.add("scenario.id", "empty id");

  std::set<std::string> hop_ids;
  for (std::size_t i = 0; i < s.hops.size(); ++i) {
    const auto& hop = s.hops[i];
    const auto path = "scenario." + indexed("hops", i);
    if (hop.id.empty()) out.add(path + ".id", "empty id");
    else if (!hop_ids.insert(hop.id).second) out.add(path + ".id", "duplicate hop id '" + hop.id + "'");
  }

  if (s.avs.empty()) out.add("scenario.avs", "no attack vectors");
  std::set<std::string> av_ids;
  for (std::size_t i = 0; i < s.avs.size(); ++i) {
    const auto& av = s.avs[i];
    const auto path = "scenario." + indexed("avs", i);
    if (av.id.empty()) out.add(path + ".id", "empty id");
    else if (!av_ids.insert(av.id).second) out.add(path + ".id", "duplicate attack vector id '" + av.id + "'");
    if (av.hop_path.empty()) out.add(path + ".hops", "empty hop path");
    for (std::size_t k = 0; k < av.hop_path.size(); ++k) {
      if (!hop_ids.contains(av.hop_path[k])) {
        out.add(path + "." + indexed("hops", k), "unknown hop '" + av.hop_path[k] + "'");
      }
    }
  }

  std::set<std::string> question_ids;
  std::size_t overall = 0;
  for (std::size_t i = 0; i < s.questions.size(); ++i) {
    const auto& q = s.questions[i];
    const auto path = "scenario." + indexed("questions", i);
    if (q.id.empty()) out.add(path + ".id", "empty id");
    else if (!question_ids.insert(q.id).second) out.add(path + ".id", "duplicate question id '" + q.id + "'");
    if (q.text.empty()) out.add(path + ".text", "empty text");
    if (q.is_overall) ++overall;
  }
  if (overall != 1) {
    out.add("scenario.questions", "expected exactly one overall question, found " + std::to_string(overall));
  }
}

}  // namespace

ValidationReport validate_scenario(const Scenario& scenario, std::span<const Expert> experts,
                                   std::span<const RankingSheet> rankings,
                                   std::span<const IntervalResponse> responses) {
  Collector out;
  check_scenario(scenario, out);

  std::set<std::string> expert_ids;
  std::size_t references = 0;
  for (std::size_t i = 0; i < experts.size(); ++i) {
    const auto& e = experts[i];
    const auto path = indexed("experts", i);
    if (e.id.empty()) out.add(path + ".id", "empty id");
    else if (!expert_ids.insert(e.id).second) out.add(path + ".id", "duplicate expert id '" + e.id + "'");
    if (e.is_reference) ++references;
  }
  if (references > 1) {
    out.add("experts", "more than one reference expert (" + std::to_string(references) + ")");
  }

  const auto items = scenario.av_ids();
  std::set<std::string> ranked;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const auto& sheet = rankings[i];
    const auto path = indexed("rankings", i);
    if (!expert_ids.contains(sheet.expert_id)) {
      out.add(path + ".expert_id", "unknown expert '" + sheet.expert_id + "'");
    }
    if (!ranked.insert(sheet.expert_id).second) {
      out.add(path + ".expert_id", "second ranking sheet for expert '" + sheet.expert_id + "'");
    }
    if (!is_permutation_of(sheet.ranks, items)) {
      out.add(path + ".ranks", "not a permutation of 1.." + std::to_string(items.size()) +
                                   " over the scenario's attack vectors");
    }
  }

  std::set<std::string> question_ids;
  for (const auto& q : scenario.questions) question_ids.insert(q.id);
  std::set<std::tuple<std::string, std::string, std::string>> answered;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto& r = responses[i];
    const auto path = indexed("intervals", i);
    if (!expert_ids.contains(r.expert_id)) out.add(path + ".expert_id", "unknown expert '" + r.expert_id + "'");
    if (!scenario.find_hop(r.hop_id)) out.add(path + ".hop_id", "unknown hop '" + r.hop_id + "'");
    if (!question_ids.contains(r.question_id)) {
      out.add(path + ".question_id", "unknown question '" + r.question_id + "'");
    }
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      out.add(path, "non-finite bound");
    } else {
      if (r.lo < kScaleMin || r.hi > kScaleMax || r.lo > kScaleMax || r.hi < kScaleMin) {
        out.add(path, "bound outside [0, 100]");
      }
      if (r.lo > r.hi) out.add(path, "lo > hi");
    }
    if (!answered.emplace(r.expert_id, r.hop_id, r.question_id).second) {
      out.add(path, "duplicate response for expert '" + r.expert_id + "', hop '" + r.hop_id +
                        "', question '" + r.question_id + "'");
    }
  }
  return out.take();
}

}  // namespace elicit
