#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "elicit/dataset.hpp"

namespace elicit::survey {

enum class SessionState { Ranking, Rating, Submitted };

std::string_view to_string(SessionState state);

struct Session {
  std::string session_id;
  std::string expert_id;
  SessionState state = SessionState::Ranking;
  std::string created_at;  // ISO-8601 UTC
  std::map<std::string, int> ranks;
  std::vector<IntervalResponse> responses;
  /// (hop id, question id) pairs still required before submission.
  std::set<std::pair<std::string, std::string>> remaining;
};

nlohmann::json to_json(const Session& session);

/// Error with a stable machine-readable code and an HTTP status.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& detail)
      : std::runtime_error(detail), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

struct StoreConfig {
  std::filesystem::path directory;
  /// Questions every hop must be answered for; empty = every question.
  std::vector<std::string> required_questions;
};

/// Session store backed by one append-only record log per session plus an
/// append-only index. State is rebuilt by replaying the logs on open; a
/// torn trailing record (crash mid-write) is ignored.
///
/// Thread-safe. Operations on one session are serialized; different
/// sessions proceed independently; export sees a consistent snapshot.
class SurveyStore {
 public:
  SurveyStore(Scenario scenario, std::vector<Expert> roster, StoreConfig config);
  ~SurveyStore();

  SurveyStore(const SurveyStore&) = delete;
  SurveyStore& operator=(const SurveyStore&) = delete;

  const Scenario& scenario() const noexcept { return scenario_; }

  Session create_session(const std::string& expert_id);
  Session submit_ranking(const std::string& session_id, const std::map<std::string, int>& ranks);
  Session submit_interval(const std::string& session_id, const std::string& hop_id,
                          const std::string& question_id, double lo, double hi);
  Session get_session(const std::string& session_id) const;

  /// Dataset of submitted sessions (plus open ones when `include_partial`).
  /// Throws ServiceError "nothing_to_export" when no session qualifies.
  Dataset export_dataset(bool include_partial = false) const;

  std::size_t session_count() const;

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  void replay();
  void append(Entry& entry, const nlohmann::json& record);
  void apply(Session& session, const nlohmann::json& record) const;
  std::set<std::pair<std::string, std::string>> checklist() const;

  Scenario scenario_;
  std::vector<Expert> roster_;
  StoreConfig config_;
  std::filesystem::path sessions_dir_;
  std::filesystem::path index_path_;

  mutable std::shared_mutex store_mutex_;  // shared: per-session ops; unique: create/export
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, std::string> session_by_expert_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string admin_token;
};

/// Mounts the HTTP+JSON API for `store` and blocks serving requests until
/// stop() is called from another thread.
class SurveyServer {
 public:
  SurveyServer(SurveyStore& store, ServerConfig config);
  ~SurveyServer();

  /// Binds and serves; returns false when the port cannot be bound.
  bool listen();
  /// Binds to an ephemeral port and returns it, or -1. Call serve() next.
  int bind_any_port();
  void serve();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace elicit::survey
