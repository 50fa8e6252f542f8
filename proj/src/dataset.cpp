#include "elicit/dataset.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace elicit {

using nlohmann::json;
namespace fs = std::filesystem;

const Expert* Dataset::find_expert(const std::string& id) const {
  auto it = std::find_if(experts.begin(), experts.end(), [&](const Expert& e) { return e.id == id; });
  return it == experts.end() ? nullptr : &*it;
}

const RankingSheet* Dataset::find_sheet(const std::string& expert_id) const {
  auto it = std::find_if(rankings.begin(), rankings.end(),
                         [&](const RankingSheet& s) { return s.expert_id == expert_id; });
  return it == rankings.end() ? nullptr : &*it;
}

bool Dataset::same_content(const Dataset& other) const {
  return scenario == other.scenario && experts == other.experts && rankings == other.rankings &&
         responses == other.responses;
}

namespace {

std::string summarize(const ValidationReport& violations) {
  std::string out = "dataset failed validation (" + std::to_string(violations.size()) + " violation" +
                    (violations.size() == 1 ? "" : "s") + ")";
  for (const auto& v : violations) out += "\n  " + to_string(v);
  return out;
}

}  // namespace

DatasetValidationError::DatasetValidationError(ValidationReport violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

json scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "scenario";
  doc["id"] = scenario.id;
  doc["hops"] = json::array();
  for (const auto& h : scenario.hops) {
    doc["hops"].push_back({{"id", h.id}, {"name", h.name}, {"description", h.description}});
  }
  doc["avs"] = json::array();
  for (const auto& av : scenario.avs) {
    doc["avs"].push_back({{"id", av.id}, {"name", av.name}, {"hops", av.hop_path}});
  }
  doc["questions"] = json::array();
  for (const auto& q : scenario.questions) {
    doc["questions"].push_back({{"id", q.id}, {"text", q.text}, {"overall", q.is_overall}});
  }
  return doc;
}

namespace {

void check_header(const json& doc, std::string_view kind) {
  if (!doc.is_object()) throw DatasetIoError("document is not a JSON object");
  if (!doc.contains("format_version")) throw DatasetIoError("missing format_version");
  const auto version = doc.at("format_version").get<int>();
  if (version != kFormatVersion) {
    throw DatasetIoError("format_version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kFormatVersion) + ")");
  }
  if (doc.value("kind", std::string{}) != kind) {
    throw DatasetIoError("expected a '" + std::string(kind) + "' document");
  }
}

std::string optional_string(const json& obj, const char* key) {
  return obj.contains(key) ? obj.at(key).get<std::string>() : std::string{};
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  check_header(doc, "scenario");
  Scenario s;
  s.id = doc.at("id").get<std::string>();
  for (const auto& h : doc.at("hops")) {
    s.hops.push_back({h.at("id").get<std::string>(), optional_string(h, "name"),
                      optional_string(h, "description")});
  }
  for (const auto& a : doc.at("avs")) {
    s.avs.push_back({a.at("id").get<std::string>(), optional_string(a, "name"),
                     a.at("hops").get<std::vector<std::string>>()});
  }
  for (const auto& q : doc.at("questions")) {
    s.questions.push_back({q.at("id").get<std::string>(), q.at("text").get<std::string>(),
                           q.value("overall", false)});
  }
  return s;
}

json responses_to_json(std::span<const Expert> experts, std::span<const RankingSheet> rankings,
                       std::span<const IntervalResponse> responses, std::optional<std::uint64_t> seed) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "responses";
  if (seed) doc["seed"] = *seed;
  doc["experts"] = json::array();
  for (const auto& e : experts) {
    doc["experts"].push_back({{"id", e.id}, {"group", e.group_id}, {"reference", e.is_reference}});
  }
  doc["rankings"] = json::array();
  for (const auto& r : rankings) {
    json ranks = json::object();
    for (const auto& [av, rank] : r.ranks) ranks[av] = rank;
    doc["rankings"].push_back({{"expert_id", r.expert_id}, {"ranks", std::move(ranks)}});
  }
  doc["intervals"] = json::array();
  for (const auto& i : responses) {
    doc["intervals"].push_back({{"expert_id", i.expert_id},
                                {"hop_id", i.hop_id},
                                {"question_id", i.question_id},
                                {"lo", i.lo},
                                {"hi", i.hi}});
  }
  return doc;
}

namespace {

struct Sources {
  std::vector<std::string> experts;
  std::vector<std::string> rankings;
  std::vector<std::string> intervals;
};

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  while (true) {
    const auto comma = line.find(',');
    cells.push_back(strip(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return cells;
}

std::vector<RankingSheet> parse_rankings_csv(const std::string& text, const std::string& origin,
                                             std::vector<std::string>* sources) {
  std::vector<RankingSheet> sheets;
  std::map<std::string, std::size_t> index;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (!header_seen) {
      if (cells.size() != 3 || cells[0] != "expert_id" || cells[1] != "av_id" || cells[2] != "rank") {
        throw DatasetIoError(where + ": expected header 'expert_id,av_id,rank'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) throw DatasetIoError(where + ": expected 3 fields");
    int rank = 0;
    const auto r = cells[2];
    auto [ptr, ec] = std::from_chars(r.data(), r.data() + r.size(), rank);
    if (ec != std::errc{} || ptr != r.data() + r.size()) {
      throw DatasetIoError(where + ": rank '" + std::string(r) + "' is not an integer");
    }
    const std::string expert(cells[0]);
    auto [it, inserted] = index.emplace(expert, sheets.size());
    if (inserted) {
      sheets.push_back({expert, {}});
      if (sources) sources->push_back(where);
    }
    if (!sheets[it->second].ranks.emplace(std::string(cells[1]), rank).second) {
      throw DatasetIoError(where + ": attack vector '" + std::string(cells[1]) +
                           "' ranked twice by '" + expert + "'");
    }
  }
  if (!header_seen) throw DatasetIoError(origin + ": empty rankings file");
  return sheets;
}

void read_responses(const json& doc, const std::string& origin, Dataset& out, Sources& sources) {
  check_header(doc, "responses");
  if (doc.contains("seed")) out.provenance.seed = doc.at("seed").get<std::uint64_t>();
  const auto records = [&](const char* key) { return doc.contains(key) ? doc.at(key) : json::array(); };

  std::size_t i = 0;
  for (const auto& e : records("experts")) {
    out.experts.push_back({e.at("id").get<std::string>(), e.value("group", std::string{}),
                           e.value("reference", false)});
    sources.experts.push_back(origin + ": experts[" + std::to_string(i++) + "]");
  }
  i = 0;
  for (const auto& r : records("rankings")) {
    const auto where = origin + ": rankings[" + std::to_string(i++) + "]";
    RankingSheet sheet{r.at("expert_id").get<std::string>(), {}};
    for (const auto& [av, rank] : r.at("ranks").items()) {
      if (!rank.is_number_integer()) throw DatasetIoError(where + ": rank of '" + av + "' is not an integer");
      sheet.ranks.emplace(av, rank.get<int>());
    }
    out.rankings.push_back(std::move(sheet));
    sources.rankings.push_back(where);
  }
  i = 0;
  for (const auto& v : records("intervals")) {
    out.responses.push_back({v.at("expert_id").get<std::string>(), v.at("hop_id").get<std::string>(),
                             v.at("question_id").get<std::string>(), v.at("lo").get<double>(),
                             v.at("hi").get<double>()});
    sources.intervals.push_back(origin + ": intervals[" + std::to_string(i++) + "]");
  }
}

// Replaces a leading "rankings[i]" / "intervals[i]" / "experts[i]" with the
// record's file position.
Violation locate(Violation v, const Sources& sources, const std::string& scenario_origin) {
  const auto rewrite = [&](std::string_view prefix, const std::vector<std::string>& table) {
    if (!v.path.starts_with(prefix)) return false;
    const auto close = v.path.find(']');
    const auto index = std::stoul(v.path.substr(prefix.size(), close - prefix.size()));
    if (index < table.size()) v.path = table[index] + v.path.substr(close + 1);
    return true;
  };
  if (rewrite("rankings[", sources.rankings) || rewrite("intervals[", sources.intervals) ||
      rewrite("experts[", sources.experts)) {
    return v;
  }
  if (v.path.starts_with("scenario")) v.path = scenario_origin + ": " + v.path;
  return v;
}

std::vector<fs::path> expand(std::span<const fs::path> paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".json" || ext == ".csv")) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p, ec)) {
      files.push_back(p);
    } else {
      throw DatasetIoError(p.string() + ": no such file or directory");
    }
  }
  if (files.empty()) throw DatasetIoError("no dataset files given");
  return files;
}

}  // namespace

std::vector<RankingSheet> rankings_from_csv(const std::string& text, const std::string& origin) {
  return parse_rankings_csv(text, origin, nullptr);
}

std::string rankings_to_csv(std::span<const RankingSheet> rankings) {
  std::string out = "expert_id,av_id,rank\n";
  for (const auto& sheet : rankings) {
    for (const auto& [av, rank] : sheet.ranks) {
      out += sheet.expert_id + "," + av + "," + std::to_string(rank) + "\n";
    }
  }
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetIoError(path.string() + ": cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetIoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out.flush()) throw DatasetIoError(path.string() + ": write failed");
}

LoadResult load_dataset_unchecked(std::span<const fs::path> paths) {
  LoadResult result;
  Dataset& ds = result.dataset;
  Sources sources;
  std::string scenario_origin;

  for (const auto& file : expand(paths)) {
    const auto origin = file.string();
    const auto text = read_text_file(file);
    ds.provenance.sources.push_back(origin);
    if (file.extension() == ".csv") {
      auto sheets = parse_rankings_csv(text, origin, &sources.rankings);
      ds.rankings.insert(ds.rankings.end(), sheets.begin(), sheets.end());
      continue;
    }
    try {
      const auto doc = json::parse(text);
      const auto kind = doc.is_object() ? doc.value("kind", std::string{}) : std::string{};
      if (kind == "scenario") {
        if (!scenario_origin.empty()) {
          throw DatasetIoError("second scenario document (first was " + scenario_origin + ")");
        }
        ds.scenario = scenario_from_json(doc);
        scenario_origin = origin;
      } else if (kind == "responses") {
        read_responses(doc, origin, ds, sources);
      } else {
        throw DatasetIoError("unknown document kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw DatasetIoError(origin + ": " + e.what());
    } catch (const DatasetIoError& e) {
      const std::string what = e.what();
      if (what.starts_with(origin)) throw;
      throw DatasetIoError(origin + ": " + what);
    }
  }
  if (scenario_origin.empty()) throw DatasetIoError("no scenario document among the inputs");

  for (auto& v : validate_scenario(ds.scenario, ds.experts, ds.rankings, ds.responses)) {
    result.violations.push_back(locate(std::move(v), sources, scenario_origin));
  }
  return result;
}

Dataset load_dataset(std::span<const fs::path> paths) {
  auto result = load_dataset_unchecked(paths);
  if (!result.violations.empty()) throw DatasetValidationError(std::move(result.violations));
  return std::move(result.dataset);
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DatasetIoError(dir.string() + ": " + ec.message());
  write_text_file(dir / "scenario.json", scenario_to_json(dataset.scenario).dump(2) + "\n");
  write_text_file(dir / "responses.json",
                  responses_to_json(dataset.experts, dataset.rankings, dataset.responses,
                                    dataset.provenance.seed)
                          .dump(2) +
                      "\n");
}

std::string canonical_json(const Dataset& dataset) {
  json doc;
  doc["scenario"] = scenario_to_json(dataset.scenario);
  doc["responses"] = responses_to_json(dataset.experts, dataset.rankings, dataset.responses);
  return doc.dump();
}

std::string dataset_hash(const Dataset& dataset) {
  const auto text = canonical_json(dataset);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

}  // namespace elicit
