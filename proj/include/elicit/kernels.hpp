#pragma once

// Cohort-level kernels. The elicit::kernels versions parallelize the outer
// loop with OpenMP; elicit::reference holds the serial implementations the
// tests and benchmarks compare against. Both produce identical results for
// any thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "elicit/consensus.hpp"
#include "elicit/interval_agg.hpp"
#include "elicit/rank_stats.hpp"

namespace elicit {

namespace kernels {

/// Kendall's W of `trials` uniform-random cohorts of m rankings over n items.
/// Trial t draws from derive_seed(seed, t).
std::vector<double> baseline_w(std::size_t m, std::size_t n, std::size_t trials,
                               std::uint64_t seed);

/// Agreement of every row of a row-major m x n rank matrix with `consensus`.
std::vector<AgreementStats> agreement_rows(std::span<const double> rank_matrix, std::size_t m,
                                           std::span<const double> consensus);

/// Derived-vs-actual outcomes, [method][expert].
std::vector<std::vector<MethodOutcome>> method_cells(std::span<const RankingSheet> actual,
                                                     std::span<const ExpertHopRatings> ratings,
                                                     const Scenario& scenario,
                                                     std::span<const AggregationMethod> methods);

/// Threads OpenMP will use for the kernels above.
int max_threads();

}  // namespace kernels

namespace reference {

std::vector<double> baseline_w(std::size_t m, std::size_t n, std::size_t trials,
                               std::uint64_t seed);

std::vector<AgreementStats> agreement_rows(std::span<const double> rank_matrix, std::size_t m,
                                           std::span<const double> consensus);

std::vector<std::vector<MethodOutcome>> method_cells(std::span<const RankingSheet> actual,
                                                     std::span<const ExpertHopRatings> ratings,
                                                     const Scenario& scenario,
                                                     std::span<const AggregationMethod> methods);

}  // namespace reference

/// Kendall's W of one random cohort, the unit of work shared by both paths.
double random_cohort_w(std::size_t m, std::size_t n, std::uint64_t trial_seed,
                       std::vector<double>& scratch);

/// One derived-vs-actual comparison, errors captured in the outcome.
MethodOutcome compare_method(const RankingSheet& actual, const ExpertHopRatings& ratings,
                             const Scenario& scenario, const AggregationMethod& method);

}  // namespace elicit
