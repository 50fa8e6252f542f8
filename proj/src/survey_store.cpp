#include "elicit/survey.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <random>

namespace elicit::survey {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::Ranking: return "ranking";
    case SessionState::Rating: return "rating";
    case SessionState::Submitted: return "submitted";
  }
  return "ranking";
}

json to_json(const Session& s) {
  json doc{{"session_id", s.session_id},
           {"expert_id", s.expert_id},
           {"state", to_string(s.state)},
           {"created_at", s.created_at}};
  json ranks = json::object();
  for (const auto& [av, r] : s.ranks) ranks[av] = r;
  doc["ranks"] = ranks;
  json responses = json::array();
  for (const auto& r : s.responses) {
    responses.push_back({{"hop_id", r.hop_id}, {"question_id", r.question_id}, {"lo", r.lo}, {"hi", r.hi}});
  }
  doc["responses"] = responses;
  json remaining = json::array();
  for (const auto& [hop, question] : s.remaining) remaining.push_back({{"hop_id", hop}, {"question_id", question}});
  doc["remaining"] = remaining;
  return doc;
}

namespace {

class AppendFile {
 public:
  explicit AppendFile(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw std::runtime_error(path.string() + ": " + std::strerror(errno));
  }
  ~AppendFile() {
    if (fd_ >= 0) ::close(fd_);
  }
  AppendFile(const AppendFile&) = delete;
  AppendFile& operator=(const AppendFile&) = delete;

  // One record per line; durable before returning.
  void append_line(const std::string& line) {
    std::string buf = line + "\n";
    const char* p = buf.data();
    std::size_t left = buf.size();
    while (left > 0) {
      const ssize_t n = ::write(fd_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(std::string("append failed: ") + std::strerror(errno));
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw std::runtime_error(std::string("fsync failed: ") + std::strerror(errno));
  }

 private:
  int fd_ = -1;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string new_session_id() {
  static thread_local std::mt19937_64 engine{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int word = 0; word < 2; ++word) {
    auto bits = engine();
    for (int i = 0; i < 16; ++i, bits >>= 4) id.push_back(kHex[bits & 0xF]);
  }
  return id;
}

}  // namespace

struct SurveyStore::Entry {
  std::mutex mutex;
  Session session;
  std::unique_ptr<AppendFile> log;
};

SurveyStore::SurveyStore(Scenario scenario, std::vector<Expert> roster, StoreConfig config)
    : scenario_(std::move(scenario)), roster_(std::move(roster)), config_(std::move(config)) {
  if (!scenario_.overall_question()) throw std::invalid_argument("scenario has no overall question");
  for (const auto& q : config_.required_questions) {
    if (std::none_of(scenario_.questions.begin(), scenario_.questions.end(),
                     [&](const Question& s) { return s.id == q; })) {
      throw std::invalid_argument("required question '" + q + "' is not in the scenario");
    }
  }
  sessions_dir_ = config_.directory / "sessions";
  index_path_ = config_.directory / "index.log";
  fs::create_directories(sessions_dir_);
  replay();
}

SurveyStore::~SurveyStore() = default;

std::set<std::pair<std::string, std::string>> SurveyStore::checklist() const {
  std::vector<std::string> questions = config_.required_questions;
  if (questions.empty()) {
    for (const auto& q : scenario_.questions) questions.push_back(q.id);
  }
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& hop : scenario_.hops) {
    for (const auto& q : questions) out.emplace(hop.id, q);
  }
  return out;
}

void SurveyStore::apply(Session& s, const json& record) const {
  const auto type = record.at("type").get<std::string>();
  if (type == "created") {
    s.session_id = record.at("session_id").get<std::string>();
    s.expert_id = record.at("expert_id").get<std::string>();
    s.created_at = record.at("created_at").get<std::string>();
    s.state = SessionState::Ranking;
    s.remaining = checklist();
  } else if (type == "ranking") {
    s.ranks = record.at("ranks").get<std::map<std::string, int>>();
    s.state = SessionState::Rating;
  } else if (type == "interval") {
    IntervalResponse r{s.expert_id, record.at("hop_id").get<std::string>(),
                       record.at("question_id").get<std::string>(), record.at("lo").get<double>(),
                       record.at("hi").get<double>()};
    s.remaining.erase({r.hop_id, r.question_id});
    s.responses.push_back(std::move(r));
    if (s.remaining.empty()) s.state = SessionState::Submitted;
  } else {
    throw std::runtime_error("unknown record type '" + type + "'");
  }
}

void SurveyStore::append(Entry& entry, const json& record) {
  entry.log->append_line(record.dump());
}

void SurveyStore::replay() {
  std::vector<fs::path> logs;
  for (const auto& item : fs::directory_iterator(sessions_dir_)) {
    if (item.is_regular_file() && item.path().extension() == ".log") logs.push_back(item.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::ifstream in(path, std::ios::binary);
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    in.close();
    auto entry = std::make_shared<Entry>();
    bool created = false;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
      ++line_no;
      const auto end = text.find('\n', pos);
      const auto line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error&) {
        if (end != std::string::npos) {
          throw std::runtime_error(path.string() + ": corrupt record on line " + std::to_string(line_no));
        }
        // torn final write: drop it so later appends start on a clean line
        fs::resize_file(path, pos);
        break;
      }
      apply(entry->session, record);
      created = true;
      if (end == std::string::npos) {
        std::ofstream(path, std::ios::app | std::ios::binary) << '\n';
        break;
      }
      pos = end + 1;
    }
    if (!created) continue;
    entry->log = std::make_unique<AppendFile>(path);
    session_by_expert_[entry->session.expert_id] = entry->session.session_id;
    sessions_[entry->session.session_id] = std::move(entry);
  }
}

std::shared_ptr<SurveyStore::Entry> SurveyStore::find(const std::string& session_id) const {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown_session", "no session '" + session_id + "'");
  return it->second;
}

Session SurveyStore::create_session(const std::string& expert_id) {
  std::unique_lock lock(store_mutex_);
  if (std::none_of(roster_.begin(), roster_.end(), [&](const Expert& e) { return e.id == expert_id; })) {
    throw ServiceError(404, "unknown_expert", "expert '" + expert_id + "' is not on the roster");
  }
  if (auto it = session_by_expert_.find(expert_id); it != session_by_expert_.end()) {
    throw ServiceError(409, "session_exists",
                       "expert '" + expert_id + "' already has session '" + it->second + "'");
  }
  std::string id;
  do {
    id = new_session_id();
  } while (sessions_.contains(id));

  auto entry = std::make_shared<Entry>();
  entry->log = std::make_unique<AppendFile>(sessions_dir_ / (id + ".log"));
  const json record{{"type", "created"}, {"session_id", id}, {"expert_id", expert_id}, {"created_at", utc_now()}};
  append(*entry, record);
  apply(entry->session, record);
  AppendFile(index_path_).append_line(json{{"session_id", id}, {"expert_id", expert_id}}.dump());

  session_by_expert_[expert_id] = id;
  sessions_[id] = entry;
  return entry->session;
}

Session SurveyStore::submit_ranking(const std::string& session_id, const std::map<std::string, int>& ranks) {
  std::shared_lock store_lock(store_mutex_);
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  auto& s = entry->session;
  if (s.state != SessionState::Ranking) {
    throw ServiceError(409, "wrong_state", "session is in state '" + std::string(to_string(s.state)) +
                                               "'; rankings are accepted only once, before rating");
  }
  const auto items = scenario_.av_ids();
  if (!is_permutation_of(ranks, items)) {
    throw ServiceError(422, "not_permutation",
                       "ranks must be a permutation of 1.." + std::to_string(items.size()) +
                           " over every attack vector");
  }
  json ranks_json = json::object();
  for (const auto& [av, r] : ranks) ranks_json[av] = r;
  const json record{{"type", "ranking"}, {"ranks", ranks_json}};
  append(*entry, record);
  apply(s, record);
  return s;
}

Session SurveyStore::submit_interval(const std::string& session_id, const std::string& hop_id,
                                     const std::string& question_id, double lo, double hi) {
  std::shared_lock store_lock(store_mutex_);
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  auto& s = entry->session;
  if (s.state != SessionState::Rating) {
    throw ServiceError(409, "wrong_state", "session is in state '" + std::string(to_string(s.state)) +
                                               "'; intervals are accepted only while rating");
  }
  if (!scenario_.find_hop(hop_id)) throw ServiceError(422, "unknown_hop", "no hop '" + hop_id + "'");
  if (std::none_of(scenario_.questions.begin(), scenario_.questions.end(),
                   [&](const Question& q) { return q.id == question_id; })) {
    throw ServiceError(422, "unknown_question", "no question '" + question_id + "'");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < kScaleMin || hi > kScaleMax || lo > kScaleMax ||
      hi < kScaleMin) {
    throw ServiceError(422, "out_of_range", "interval bounds must lie within [0, 100]");
  }
  if (lo > hi) throw ServiceError(422, "inverted_interval", "lo must not exceed hi");
  if (std::any_of(s.responses.begin(), s.responses.end(), [&](const IntervalResponse& r) {
        return r.hop_id == hop_id && r.question_id == question_id;
      })) {
    throw ServiceError(409, "duplicate_response",
                       "hop '" + hop_id + "', question '" + question_id + "' is already answered");
  }
  const json record{{"type", "interval"}, {"hop_id", hop_id}, {"question_id", question_id}, {"lo", lo}, {"hi", hi}};
  append(*entry, record);
  apply(s, record);
  return s;
}

Session SurveyStore::get_session(const std::string& session_id) const {
  std::shared_lock store_lock(store_mutex_);
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  return entry->session;
}

std::size_t SurveyStore::session_count() const {
  std::shared_lock lock(store_mutex_);
  return sessions_.size();
}

Dataset SurveyStore::export_dataset(bool include_partial) const {
  std::unique_lock lock(store_mutex_);
  Dataset ds;
  ds.scenario = scenario_;
  ds.provenance.sources.push_back(config_.directory.string());
  for (const auto& expert : roster_) {
    auto it = session_by_expert_.find(expert.id);
    if (it == session_by_expert_.end()) continue;
    const auto& entry = sessions_.at(it->second);
    std::lock_guard session_lock(entry->mutex);
    const auto& s = entry->session;
    if (s.state != SessionState::Submitted && !include_partial) continue;
    ds.experts.push_back(expert);
    if (!s.ranks.empty()) ds.rankings.push_back({s.expert_id, s.ranks});
    ds.responses.insert(ds.responses.end(), s.responses.begin(), s.responses.end());
  }
  if (ds.experts.empty()) {
    throw ServiceError(409, "nothing_to_export",
                       include_partial ? "no sessions exist" : "no submitted sessions");
  }
  return ds;
}

}  // namespace elicit::survey
