#include "elicit/sample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "elicit/interval_agg.hpp"
#include "elicit/random.hpp"

namespace elicit {

namespace {

constexpr std::array<const char*, 26> kHopNames{
    "Deliver crafted attachment past mail gateway",
    "Exploit document viewer on workstation",
    "Escalate to local administrator",
    "Move laterally to file server",
    "Exfiltrate through web proxy",
    "Phish administrator credentials",
    "Access cryptographic device management port",
    "Load rogue key material",
    "Exploit VOIP softphone parser",
    "Abuse network management console",
    "Push malicious configuration to switches",
    "Harvest credentials from remote site laptop",
    "Authenticate over remote access gateway",
    "Upload document to shared workspace",
    "Trigger macro execution by recipient",
    "Exploit enterprise directory service",
    "Pivot through enterprise messaging server",
    "Serve exploit from watering-hole website",
    "Compromise hypervisor management interface",
    "Escape guest virtual machine",
    "Reconfigure storage area network zoning",
    "Send crafted instant message",
    "Exploit instant messaging client",
    "Persist via scheduled task",
    "Inject SQL through public web form",
    "Read back-office database tables",
};

constexpr std::array<const char*, 10> kAvNames{
    "Malformed document via email",
    "Compromise central cryptographic device",
    "Attack via VOIP client",
    "Attack via network management tools",
    "Steal credentials and upload malicious document",
    "Attack via enterprise services",
    "Entice user to malicious website",
    "Subvert storage via virtualisation infrastructure",
    "Instant messaging client",
    "Malicious SQL injection",
};

// Hop numbers per attack vector; repeats are intentional.
const std::array<std::vector<int>, 10> kPaths{{
    {2, 3, 1, 4, 5},
    {6, 7, 6, 8, 4},
    {9},
    {10, 11, 4, 5},
    {12, 13, 2, 3, 14, 15, 4, 5},
    {16, 16, 17, 4, 5},
    {6, 18, 4, 5},
    {19, 20, 21},
    {22, 23, 24},
    {25, 26, 1, 4, 5},
}};

struct GroupShape {
  const char* id;
  int size;
  double noise;  // sd of an expert's hop-perception error
};

// Uneven sizes and agreement levels: D tight, G loose.
constexpr std::array<GroupShape, 7> kGroups{{
    {"A", 5, 8.0},
    {"B", 6, 11.0},
    {"C", 6, 8.0},
    {"D", 4, 4.0},
    {"E", 5, 14.0},
    {"F", 8, 10.0},
    {"G", 5, 18.0},
}};

// Experts whose judgments are mostly idiosyncratic.
constexpr std::array<const char*, 5> kContrarians{"A.e", "E.a", "E.c", "F.b", "G.c"};

double to_half_step(double x) { return std::round(x * 2.0) / 2.0; }

double clamp_scale(double x) { return std::clamp(x, kScaleMin, kScaleMax); }

}  // namespace

Scenario make_sample_scenario() {
  Scenario s;
  s.id = "synthetic-government-network";
  for (std::size_t i = 0; i < kHopNames.size(); ++i) {
    s.hops.push_back({"H" + std::to_string(i + 1), kHopNames[i], "Synthetic hop " + std::to_string(i + 1)});
  }
  for (std::size_t i = 0; i < kPaths.size(); ++i) {
    AttackVector av{"AV" + std::to_string(i + 1), kAvNames[i], {}};
    for (int hop : kPaths[i]) av.hop_path.push_back("H" + std::to_string(hop));
    s.avs.push_back(std::move(av));
  }
  s.questions = {
      {"overall", "Overall, how hard is it for an attacker to complete this hop undetected?", true},
      {"maturity", "How established is the technology of the target component?", false},
      {"tooling", "How likely is a public tool that assists this step?", false},
      {"inputs", "How much does the target component process its data inputs?", false},
      {"complexity", "How complex is the target component?", false},
  };
  return s;
}

Dataset make_sample_dataset(std::uint64_t seed) {
  Dataset ds;
  ds.scenario = make_sample_scenario();
  ds.provenance.seed = seed;
  const auto& scenario = ds.scenario;

  Rng rng(seed);
  std::vector<double> latent(scenario.hops.size());
  for (auto& d : latent) d = rng.uniform(10.0, 90.0);

  for (const auto& group : kGroups) {
    const double group_bias = rng.normal() * 3.0;
    for (int k = 0; k < group.size; ++k) {
      const std::string id = std::string(group.id) + "." + static_cast<char>('a' + k);
      const bool contrarian =
          std::find(kContrarians.begin(), kContrarians.end(), id) != kContrarians.end();
      // the scenario creator sits in group A
      ds.experts.push_back({id, group.id, id == "A.a"});

      const double noise = contrarian ? 35.0 : group.noise;
      ExpertHopRatings ratings{id, {}};
      for (std::size_t h = 0; h < scenario.hops.size(); ++h) {
        const double centre = clamp_scale(latent[h] + group_bias + rng.normal() * noise);
        const double half_width = rng.uniform(3.0, 20.0);
        const double lo = to_half_step(clamp_scale(centre - half_width));
        const double hi = to_half_step(clamp_scale(centre + half_width));
        ds.responses.push_back({id, scenario.hops[h].id, "overall", lo, hi});
        ratings.overall.emplace(scenario.hops[h].id, interval_stats(lo, hi));
      }

      // The elicited ranking follows the expert's own hop view, blurred.
      const auto scores = av_scores({Operator::OwaLinear, Statistic::Mid}, ratings, scenario);
      std::vector<std::pair<double, std::size_t>> keyed;
      for (std::size_t a = 0; a < scenario.avs.size(); ++a) {
        const double blur = rng.normal() * (contrarian ? 20.0 : group.noise * 0.6);
        keyed.emplace_back(scores.at(scenario.avs[a].id) + blur, a);
      }
      std::sort(keyed.begin(), keyed.end());
      RankingSheet sheet{id, {}};
      for (std::size_t pos = 0; pos < keyed.size(); ++pos) {
        sheet.ranks.emplace(scenario.avs[keyed[pos].second].id, static_cast<int>(pos + 1));
      }
      ds.rankings.push_back(std::move(sheet));
    }
  }
  return ds;
}

}  // namespace elicit
