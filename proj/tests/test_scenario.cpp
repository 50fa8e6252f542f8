#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <limits>

#include "elicit/sample.hpp"
#include "elicit/scenario.hpp"

using namespace elicit;

namespace {

ValidationReport check(const Dataset& d) {
  return validate_scenario(d.scenario, d.experts, d.rankings, d.responses);
}

bool has(const ValidationReport& r, std::string_view path, std::string_view message) {
  return std::any_of(r.begin(), r.end(), [&](const Violation& v) {
    return v.path == path && v.message.find(message) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("the sample dataset is valid", "[scenario]") {
  const auto d = make_sample_dataset();
  const auto report = check(d);
  CHECK(report.empty());
  CHECK(check(d) == report);
  CHECK(d.scenario.avs.size() == 10);
  CHECK(d.scenario.hops.size() == 26);
  CHECK(d.experts.size() == 39);
  REQUIRE(d.scenario.overall_question() != nullptr);
  CHECK(d.scenario.find_av("AV1")->hop_path == std::vector<std::string>{"H2", "H3", "H1", "H4", "H5"});
}

TEST_CASE("validation examples", "[scenario]") {
  auto d = make_sample_dataset();

  SECTION("duplicate rank") {
    auto& ranks = d.rankings[2].ranks;
    ranks["AV1"] = ranks["AV2"];
    CHECK(has(check(d), "rankings[2].ranks", "not a permutation"));
  }
  SECTION("missing attack vector in a sheet") {
    d.rankings[0].ranks.erase("AV10");
    CHECK(has(check(d), "rankings[0].ranks", "not a permutation"));
  }
  SECTION("unknown attack vector in a sheet") {
    d.rankings[0].ranks["AV99"] = d.rankings[0].ranks["AV10"];
    d.rankings[0].ranks.erase("AV10");
    CHECK(has(check(d), "rankings[0].ranks", "not a permutation"));
  }
  SECTION("inverted interval") {
    d.responses[4].lo = 60;
    d.responses[4].hi = 40;
    const auto r = check(d);
    CHECK(has(r, "intervals[4]", "lo > hi"));
    CHECK(r.size() == 1);
  }
  SECTION("off-scale and non-finite bounds") {
    d.responses[0].hi = 100.5;
    d.responses[1].lo = std::numeric_limits<double>::quiet_NaN();
    const auto r = check(d);
    CHECK(has(r, "intervals[0]", "outside [0, 100]"));
    CHECK(has(r, "intervals[1]", "non-finite"));
  }
  SECTION("degenerate intervals are fine") {
    d.responses[0].lo = d.responses[0].hi = 0;
    d.responses[1].lo = d.responses[1].hi = 100;
    CHECK(check(d).empty());
  }
  SECTION("dangling references") {
    d.scenario.avs[3].hop_path.push_back("H99");
    d.responses[7].hop_id = "nope";
    d.responses[8].question_id = "nope";
    d.rankings[5].expert_id = "ghost";
    const auto r = check(d);
    CHECK(has(r, "scenario.avs[3].hops[4]", "unknown hop 'H99'"));
    CHECK(has(r, "intervals[7].hop_id", "unknown hop"));
    CHECK(has(r, "intervals[8].question_id", "unknown question"));
    CHECK(has(r, "rankings[5].expert_id", "unknown expert 'ghost'"));
  }
  SECTION("duplicates") {
    d.experts[1].id = d.experts[0].id;
    d.responses.push_back(d.responses[0]);
    const auto r = check(d);
    CHECK(has(r, "experts[1].id", "duplicate expert id"));
    CHECK(has(r, "intervals[" + std::to_string(d.responses.size() - 1) + "]", "duplicate response"));
  }
  SECTION("overall question count") {
    d.scenario.questions[1].is_overall = true;
    CHECK(has(check(d), "scenario.questions", "exactly one overall"));
    for (auto& q : d.scenario.questions) q.is_overall = false;
    CHECK(has(check(d), "scenario.questions", "found 0"));
  }
  SECTION("two reference experts") {
    d.experts[5].is_reference = true;
    CHECK(has(check(d), "experts", "more than one reference"));
  }
  SECTION("empty attack vector path") {
    d.scenario.avs[0].hop_path.clear();
    CHECK(has(check(d), "scenario.avs[0].hops", "empty hop path"));
  }
  SECTION("validation is idempotent") {
    d.responses[4].lo = 60;
    d.responses[4].hi = 40;
    CHECK(check(d) == check(d));
  }
}

TEST_CASE("is_permutation_of", "[scenario]") {
  const std::vector<std::string> items{"x", "y", "z"};
  CHECK(is_permutation_of({{"x", 2}, {"y", 3}, {"z", 1}}, items));
  CHECK_FALSE(is_permutation_of({{"x", 1}, {"y", 1}, {"z", 3}}, items));
  CHECK_FALSE(is_permutation_of({{"x", 1}, {"y", 2}}, items));
  CHECK_FALSE(is_permutation_of({{"x", 0}, {"y", 1}, {"z", 2}}, items));
  CHECK_FALSE(is_permutation_of({{"x", 1}, {"y", 2}, {"w", 3}}, items));
}
