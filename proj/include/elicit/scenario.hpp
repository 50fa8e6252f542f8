#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace elicit {

struct Hop {
  std::string id;
  std::string name;
  std::string description;

  bool operator==(const Hop&) const = default;
};

/// An end-to-end attack. The hop path keeps repeats exactly as authored;
/// each occurrence is scored separately.
struct AttackVector {
  std::string id;
  std::string name;
  std::vector<std::string> hop_path;

  bool operator==(const AttackVector&) const = default;
};

struct Question {
  std::string id;
  std::string text;
  bool is_overall = false;

  bool operator==(const Question&) const = default;
};

struct Scenario {
  std::string id;
  std::vector<AttackVector> avs;
  std::vector<Hop> hops;
  std::vector<Question> questions;

  const Question* overall_question() const;
  const Hop* find_hop(const std::string& hop_id) const;
  const AttackVector* find_av(const std::string& av_id) const;
  std::vector<std::string> av_ids() const;

  bool operator==(const Scenario&) const = default;
};

struct Expert {
  std::string id;
  std::string group_id;
  bool is_reference = false;  // scenario creator, used as a comparison anchor

  bool operator==(const Expert&) const = default;
};

/// One expert's elicited ordering: 1 = easiest ... n = hardest, no ties.
struct RankingSheet {
  std::string expert_id;
  std::map<std::string, int> ranks;

  bool operator==(const RankingSheet&) const = default;
};

/// An answer on the 0..100 scale; the width is the expert's uncertainty.
struct IntervalResponse {
  std::string expert_id;
  std::string hop_id;
  std::string question_id;
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const IntervalResponse&) const = default;
};

inline constexpr double kScaleMin = 0.0;
inline constexpr double kScaleMax = 100.0;

/// True when `ranks` over `items` is a permutation of 1..n.
bool is_permutation_of(const std::map<std::string, int>& ranks,
                       std::span<const std::string> items);

struct Violation {
  std::string path;  // e.g. "rankings[3].ranks", "intervals[12]"
  std::string message;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

/// Structural validation of a whole dataset. Violations are data: an empty
/// report means every downstream operation will accept the inputs.
ValidationReport validate_scenario(const Scenario& scenario, std::span<const Expert> experts,
                                   std::span<const RankingSheet> rankings,
                                   std::span<const IntervalResponse> responses);

std::string to_string(const Violation& v);

}  // namespace elicit
