#include "elicit/kernels.hpp"

#include <omp.h>

#include <exception>

#include "elicit/error.hpp"
#include "elicit/random.hpp"

namespace elicit {

double random_cohort_w(std::size_t m, std::size_t n, std::uint64_t trial_seed,
                       std::vector<double>& scratch) {
  scratch.resize(m * n);
  Rng rng(trial_seed);
  for (std::size_t j = 0; j < m; ++j) {
    rng.permutation(std::span<double>(scratch).subspan(j * n, n));
  }
  return kendall_w(scratch, m, n).w;
}

MethodOutcome compare_method(const RankingSheet& actual, const ExpertHopRatings& ratings,
                             const Scenario& scenario, const AggregationMethod& method) {
  MethodOutcome outcome{method, std::nullopt, {}};
  try {
    const auto derived = derive_ranking(ratings, scenario, method);
    outcome.rho = spearman_rho(derived, Ranking::from_sheet(actual));
    if (!outcome.rho) outcome.error = "undefined: derived ranking is fully tied";
  } catch (const MissingResponseError& e) {
    outcome.error = e.what();
  } catch (const InputError& e) {
    outcome.error = e.what();
  }
  return outcome;
}

namespace {

void check_baseline_args(std::size_t m, std::size_t n) {
  if (m < 2) throw InputError("baseline needs m >= 2");
  if (n < 2) throw InputError("baseline needs n >= 2");
}

void check_agreement_args(std::span<const double> matrix, std::size_t m,
                          std::span<const double> consensus) {
  if (matrix.size() != m * consensus.size()) throw InputError("rank matrix size is not m x n");
  if (consensus.size() < 2) throw InputError("agreement needs at least two items");
}

void check_method_args(std::span<const RankingSheet> actual, std::span<const ExpertHopRatings> ratings) {
  if (actual.size() != ratings.size()) throw InputError("one rating set per ranking sheet required");
}

}  // namespace

namespace kernels {

int max_threads() { return omp_get_max_threads(); }

std::vector<double> baseline_w(std::size_t m, std::size_t n, std::size_t trials,
                               std::uint64_t seed) {
  check_baseline_args(m, n);
  std::vector<double> out(trials);
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel
  {
    std::vector<double> scratch(m * n);
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < count; ++t) {
      out[t] = random_cohort_w(m, n, derive_seed(seed, static_cast<std::uint64_t>(t)), scratch);
    }
  }
  return out;
}

std::vector<AgreementStats> agreement_rows(std::span<const double> rank_matrix, std::size_t m,
                                           std::span<const double> consensus) {
  check_agreement_args(rank_matrix, m, consensus);
  const std::size_t n = consensus.size();
  std::vector<AgreementStats> out(m);
  const auto count = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < count; ++j) {
    const auto row = rank_matrix.subspan(static_cast<std::size_t>(j) * n, n);
    out[j] = {spearman_rho(row, consensus), footrule(row, consensus)};
  }
  return out;
}

std::vector<std::vector<MethodOutcome>> method_cells(std::span<const RankingSheet> actual,
                                                     std::span<const ExpertHopRatings> ratings,
                                                     const Scenario& scenario,
                                                     std::span<const AggregationMethod> methods) {
  check_method_args(actual, ratings);
  const std::size_t experts = actual.size();
  std::vector<std::vector<MethodOutcome>> out(methods.size(), std::vector<MethodOutcome>(experts));
  const auto cells = static_cast<std::int64_t>(methods.size() * experts);
  // compare_method captures analysis errors; anything else is rethrown after the loop
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < cells; ++c) {
    const auto k = static_cast<std::size_t>(c) / experts;
    const auto e = static_cast<std::size_t>(c) % experts;
    try {
      out[k][e] = compare_method(actual[e], ratings[e], scenario, methods[k]);
    } catch (...) {
#pragma omp critical(elicit_method_cells)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace kernels

namespace reference {

std::vector<double> baseline_w(std::size_t m, std::size_t n, std::size_t trials,
                               std::uint64_t seed) {
  check_baseline_args(m, n);
  std::vector<double> out;
  out.reserve(trials);
  std::vector<double> scratch;
  for (std::size_t t = 0; t < trials; ++t) {
    out.push_back(random_cohort_w(m, n, derive_seed(seed, t), scratch));
  }
  return out;
}

std::vector<AgreementStats> agreement_rows(std::span<const double> rank_matrix, std::size_t m,
                                           std::span<const double> consensus) {
  check_agreement_args(rank_matrix, m, consensus);
  const std::size_t n = consensus.size();
  std::vector<AgreementStats> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto row = rank_matrix.subspan(j * n, n);
    out.push_back({spearman_rho(row, consensus), footrule(row, consensus)});
  }
  return out;
}

std::vector<std::vector<MethodOutcome>> method_cells(std::span<const RankingSheet> actual,
                                                     std::span<const ExpertHopRatings> ratings,
                                                     const Scenario& scenario,
                                                     std::span<const AggregationMethod> methods) {
  check_method_args(actual, ratings);
  std::vector<std::vector<MethodOutcome>> out;
  out.reserve(methods.size());
  for (const auto& method : methods) {
    std::vector<MethodOutcome> row;
    row.reserve(actual.size());
    for (std::size_t e = 0; e < actual.size(); ++e) {
      row.push_back(compare_method(actual[e], ratings[e], scenario, method));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace reference

}  // namespace elicit
