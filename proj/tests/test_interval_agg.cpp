#include <catch2/catch_amalgamated.hpp>

#include "elicit/error.hpp"
#include "elicit/interval_agg.hpp"
#include "elicit/random.hpp"

using namespace elicit;
using Catch::Approx;

namespace {

// Expert D.b's overall intervals for the five hops of AV1 (path 2,3,1,4,5).
ExpertHopRatings five_hop_ratings() {
  ExpertHopRatings r{"D.b", {}};
  r.overall["1"] = interval_stats(10, 40);
  r.overall["2"] = interval_stats(30, 50);
  r.overall["3"] = interval_stats(11, 30);
  r.overall["4"] = interval_stats(30, 50);
  r.overall["5"] = interval_stats(60, 80);
  return r;
}

const AttackVector kAv1{"AV1", "Malformed document", {"2", "3", "1", "4", "5"}};

Scenario two_av_scenario() {
  Scenario s;
  s.id = "two";
  s.hops = {{"h1", "", ""}, {"h2", "", ""}, {"h3", "", ""}, {"h4", "", ""}};
  s.avs = {{"AVa", "", {"h1", "h2"}}, {"AVb", "", {"h3", "h4"}}};
  s.questions = {{"overall", "Overall difficulty", true}};
  return s;
}

}  // namespace

TEST_CASE("interval_stats", "[interval-agg]") {
  const auto a = interval_stats(10, 40);
  CHECK((a.lo == 10 && a.mid == 25 && a.hi == 40));
  const auto b = interval_stats(11, 30);
  CHECK((b.lo == 11 && b.mid == 20.5 && b.hi == 30));
  const auto c = interval_stats(50, 50);
  CHECK((c.lo == 50 && c.mid == 50 && c.hi == 50));
  CHECK_THROWS_AS(interval_stats(60, 40), InputError);
  const auto d = interval_stats(IntervalResponse{"e", "h", "q", 12.5, 13.0});
  CHECK(d.mid == 12.75);
}

TEST_CASE("owa_weights", "[interval-agg]") {
  SECTION("linear n=5") {
    const auto w = owa_weights(OwaScheme::Linear, 5);
    const std::vector<double> want{5.0 / 15, 4.0 / 15, 3.0 / 15, 2.0 / 15, 1.0 / 15};
    for (std::size_t i = 0; i < 5; ++i) CHECK(w[i] == Approx(want[i]).margin(1e-12));
  }
  SECTION("geometric n=5 normalizes 1/2..1/32") {
    const auto w = owa_weights(OwaScheme::Geometric, 5);
    const std::vector<double> want{16.0 / 31, 8.0 / 31, 4.0 / 31, 2.0 / 31, 1.0 / 31};
    for (std::size_t i = 0; i < 5; ++i) CHECK(w[i] == Approx(want[i]).margin(1e-12));
  }
  SECTION("single weight") {
    CHECK(owa_weights(OwaScheme::Linear, 1)[0] == 1.0);
    CHECK(owa_weights(OwaScheme::Geometric, 1)[0] == 1.0);
  }
  SECTION("n = 0 rejected") {
    CHECK_THROWS_AS(owa_weights(OwaScheme::Linear, 0), InputError);
  }
  SECTION("sum to one and strictly decreasing for n up to 60") {
    for (auto scheme : {OwaScheme::Linear, OwaScheme::Geometric}) {
      for (std::size_t n = 1; n <= 60; ++n) {
        const auto weights = owa_weights(scheme, n);
        const auto w = weights.values();
        REQUIRE(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-9);
        for (std::size_t i = 1; i < n; ++i) REQUIRE(w[i] < w[i - 1]);
      }
    }
  }
  SECTION("OwaWeights validates") {
    CHECK_THROWS_AS(OwaWeights({}), InputError);
    CHECK_THROWS_AS(OwaWeights({0.5, 0.6}), InputError);
    CHECK_THROWS_AS(OwaWeights({1.5, -0.5}), InputError);
  }
}

TEST_CASE("owa examples", "[interval-agg]") {
  CHECK(owa(OwaWeights({1, 0, 0}), std::vector<double>{3, 9, 5}) == 9);
  CHECK(owa(OwaWeights({1.0 / 3, 1.0 / 3, 1.0 / 3}), std::vector<double>{3, 9, 6}) == Approx(6).margin(1e-12));
  // sorted (70,40,40,25,20.5) . (5,4,3,2,1) / 15 = 700.5 / 15
  REQUIRE(70 * 5 + 40 * 4 + 40 * 3 + 25 * 2 + 20.5 * 1 == 700.5);
  CHECK(owa(owa_weights(OwaScheme::Linear, 5), std::vector<double>{25, 40, 20.5, 40, 70}) ==
        Approx(700.5 / 15).margin(1e-12));
  CHECK(700.5 / 15 == Approx(46.7).margin(1e-12));
  CHECK_THROWS_AS(owa(OwaWeights({0.5, 0.5}), std::vector<double>{1, 2, 3}), InputError);
  CHECK_THROWS_AS(owa(OwaWeights({0.5, 0.5}), std::vector<double>{1, NAN}), InputError);
}

TEST_CASE("owa properties on random inputs", "[interval-agg][property]") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    std::vector<double> values(n);
    for (auto& v : values) v = rng.uniform(0, 100);
    std::vector<double> raw(n);
    for (auto& w : raw) w = rng.unit();
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (auto& w : raw) w /= total;
    const OwaWeights weights(raw);
    const double base = owa(weights, values);

    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    REQUIRE(base >= *lo);
    REQUIRE(base <= *hi);

    auto shuffled = values;
    std::vector<double> perm(n);
    rng.permutation(perm);
    for (std::size_t i = 0; i < n; ++i) shuffled[i] = values[static_cast<std::size_t>(perm[i]) - 1];
    REQUIRE(owa(weights, shuffled) == Approx(base).margin(1e-12));

    auto bumped = values;
    bumped[rng.below(n)] += rng.uniform(0, 10);
    REQUIRE(owa(weights, bumped) >= base - 1e-12);

    std::vector<double> first(n, 0.0), last(n, 0.0), uniform(n, 1.0 / double(n));
    first.front() = 1.0;
    last.back() = 1.0;
    REQUIRE(std::abs(owa(OwaWeights(first), values) - *hi) <= 1e-12);
    REQUIRE(std::abs(owa(OwaWeights(last), values) - *lo) <= 1e-12);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / double(n);
    REQUIRE(std::abs(owa(OwaWeights(uniform), values) - mean) <= 1e-12);
  }
}

TEST_CASE("method names round-trip", "[interval-agg]") {
  for (const auto& m : all_methods()) CHECK(parse_method(to_string(m)) == m);
  CHECK(all_methods().size() == 18);
  CHECK(parse_method("mean:mean") == AggregationMethod{Operator::Mean, Statistic::Mid});
  CHECK(parse_methods("owa-linear:mid, max:max").size() == 2);
  CHECK_THROWS_AS(parse_method("median:mid"), InputError);
  CHECK_THROWS_AS(parse_method("mean"), InputError);
  CHECK_THROWS_AS(parse_method("mean:middle"), InputError);
}

TEST_CASE("av_score on the worked AV1 example", "[interval-agg]") {
  const auto r = five_hop_ratings();
  CHECK(av_score({Operator::Mean, Statistic::Mid}, r, kAv1) == Approx(39.1).margin(1e-12));
  CHECK(av_score({Operator::Sum, Statistic::Max}, r, kAv1) == 250);
  CHECK(av_score({Operator::Min, Statistic::Min}, r, kAv1) == 10);
  CHECK(av_score({Operator::Max, Statistic::Mid}, r, kAv1) == 70);
  CHECK(av_score({Operator::OwaLinear, Statistic::Mid}, r, kAv1) == Approx(46.7).margin(1e-12));
  // geometric: (16*70 + 8*40 + 4*40 + 2*25 + 1*20.5) / 31
  CHECK(av_score({Operator::OwaGeometric, Statistic::Mid}, r, kAv1) == Approx(1670.5 / 31).margin(1e-12));
}

TEST_CASE("av_score counts repeated hops once per occurrence", "[interval-agg]") {
  ExpertHopRatings r{"x", {{"6", interval_stats(80, 80)}, {"7", interval_stats(10, 10)}}};
  const AttackVector av{"AV2", "", {"6", "7", "6"}};
  CHECK(av_score({Operator::Sum, Statistic::Mid}, r, av) == 170);
  CHECK(av_score({Operator::Mean, Statistic::Mid}, r, av) == Approx(170.0 / 3).margin(1e-12));
  // linear n=3 weights (3,2,1)/6 over (80,80,10)
  CHECK(av_score({Operator::OwaLinear, Statistic::Mid}, r, av) == Approx(410.0 / 6).margin(1e-12));
}

TEST_CASE("av_score reports missing responses", "[interval-agg]") {
  auto r = five_hop_ratings();
  r.overall.erase("4");
  try {
    av_score({Operator::Mean, Statistic::Mid}, r, kAv1);
    FAIL("expected MissingResponseError");
  } catch (const MissingResponseError& e) {
    CHECK(e.expert_id() == "D.b");
    CHECK(e.av_id() == "AV1");
    CHECK(e.hop_id() == "4");
  }
}

TEST_CASE("collect_overall picks only the overall question", "[interval-agg]") {
  const auto s = two_av_scenario();
  auto with_other = s;
  with_other.questions.push_back({"tools", "Tooling", false});
  const std::vector<IntervalResponse> responses{
      {"x", "h1", "overall", 10, 20}, {"x", "h1", "tools", 80, 90}, {"y", "h1", "overall", 0, 5}};
  const auto r = collect_overall(with_other, "x", responses);
  REQUIRE(r.overall.size() == 1);
  CHECK(r.overall.at("h1").mid == 15);
  auto no_overall = s;
  no_overall.questions[0].is_overall = false;
  CHECK_THROWS_AS(collect_overall(no_overall, "x", responses), InputError);
}

TEST_CASE("derive_ranking", "[interval-agg]") {
  const auto s = two_av_scenario();
  SECTION("lower difficulty is rank 1") {
    ExpertHopRatings r{"x", {{"h1", interval_stats(10, 10)}, {"h2", interval_stats(20, 20)},
                             {"h3", interval_stats(50, 50)}, {"h4", interval_stats(60, 60)}}};
    const auto ranking = derive_ranking(r, s, {Operator::Mean, Statistic::Mid});
    CHECK(ranking.at("AVa") == 1);
    CHECK(ranking.at("AVb") == 2);
  }
  SECTION("identical scores tie at (n+1)/2") {
    ExpertHopRatings r{"x", {{"h1", interval_stats(10, 30)}, {"h2", interval_stats(40, 40)},
                             {"h3", interval_stats(10, 30)}, {"h4", interval_stats(40, 40)}}};
    const auto ranking = derive_ranking(r, s, {Operator::Sum, Statistic::Mid});
    CHECK(ranking.at("AVa") == 1.5);
    CHECK(ranking.at("AVb") == 1.5);
  }
  SECTION("missing responses propagate") {
    ExpertHopRatings r{"x", {{"h1", interval_stats(10, 10)}}};
    CHECK_THROWS_AS(derive_ranking(r, s, {Operator::Mean, Statistic::Mid}), MissingResponseError);
  }
}

TEST_CASE("derived ranking reproduces a ranking built from the same scores", "[interval-agg][property]") {
  Rng rng(17);
  Scenario s;
  s.id = "rt";
  s.questions = {{"overall", "Overall", true}};
  for (int h = 1; h <= 12; ++h) s.hops.push_back({"h" + std::to_string(h), "", ""});
  for (int a = 1; a <= 8; ++a) {
    AttackVector av{"AV" + std::to_string(a), "", {}};
    const auto len = 1 + rng.below(5);
    for (std::size_t k = 0; k < len; ++k) av.hop_path.push_back("h" + std::to_string(1 + rng.below(12)));
    s.avs.push_back(av);
  }
  for (int trial = 0; trial < 50; ++trial) {
    ExpertHopRatings r{"x", {}};
    for (const auto& h : s.hops) {
      const double lo = rng.uniform(0, 90);
      r.overall[h.id] = interval_stats(lo, lo + rng.uniform(0, 10));
    }
    const AggregationMethod method{Operator::Mean, Statistic::Mid};
    const auto scores = av_scores(method, r, s);
    if (count_tied(scores) > 0) continue;
    // elicited sheet = AVs sorted by this expert's own scores
    std::vector<std::pair<double, std::string>> order;
    for (const auto& [av, score] : scores) order.emplace_back(score, av);
    std::sort(order.begin(), order.end());
    std::map<std::string, double> sheet;
    for (std::size_t i = 0; i < order.size(); ++i) sheet[order[i].second] = double(i + 1);
    REQUIRE(*spearman_rho(derive_ranking(r, s, method), Ranking(sheet)) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("OWA scoring breaks ties that max scoring leaves", "[interval-agg]") {
  // Every AV shares the hardest hop, so max scoring ties them all.
  Scenario s;
  s.id = "ties";
  s.questions = {{"overall", "Overall", true}};
  s.hops = {{"peak", "", ""}, {"a", "", ""}, {"b", "", ""}, {"c", "", ""}, {"d", "", ""}};
  s.avs = {{"AV1", "", {"peak", "a"}}, {"AV2", "", {"peak", "b"}}, {"AV3", "", {"peak", "c"}},
           {"AV4", "", {"d", "a"}}};
  ExpertHopRatings r{"x", {{"peak", interval_stats(80, 90)}, {"a", interval_stats(10, 20)},
                           {"b", interval_stats(20, 30)}, {"c", interval_stats(30, 40)},
                           {"d", interval_stats(40, 50)}}};
  const auto max_ties = count_tied(av_scores({Operator::Max, Statistic::Mid}, r, s));
  const auto owa_ties = count_tied(av_scores({Operator::OwaGeometric, Statistic::Mid}, r, s));
  CHECK(max_ties == 3);
  CHECK(owa_ties < max_ties);
  CHECK(owa_ties == 0);
}

TEST_CASE("count_tied", "[interval-agg]") {
  CHECK(count_tied({{"a", 1}, {"b", 2}}) == 0);
  CHECK(count_tied({{"a", 1}, {"b", 1}, {"c", 2}, {"d", 2}, {"e", 3}}) == 4);
}
