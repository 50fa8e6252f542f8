#pragma once

#include <stdexcept>
#include <string>

namespace elicit {

/// Rejected input to an analysis operation (mismatched item sets, bad sizes,
/// non-finite values, malformed rankings).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An expert has no overall-question response for a hop that an attack
/// vector needs. Scores are never imputed.
class MissingResponseError : public std::runtime_error {
 public:
  MissingResponseError(std::string expert_id, std::string av_id, std::string hop_id)
      : std::runtime_error("missing overall response: expert '" + expert_id + "', attack vector '" +
                           av_id + "', hop '" + hop_id + "'"),
        expert_id_(std::move(expert_id)),
        av_id_(std::move(av_id)),
        hop_id_(std::move(hop_id)) {}

  const std::string& expert_id() const noexcept { return expert_id_; }
  const std::string& av_id() const noexcept { return av_id_; }
  const std::string& hop_id() const noexcept { return hop_id_; }

 private:
  std::string expert_id_;
  std::string av_id_;
  std::string hop_id_;
};

}  // namespace elicit
