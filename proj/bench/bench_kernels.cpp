// Serial reference vs OpenMP kernels on report-sized and larger cohorts.

#include <benchmark/benchmark.h>

#include "elicit/consensus.hpp"
#include "elicit/kernels.hpp"
#include "elicit/sample.hpp"

namespace {

void BM_BaselineReference(benchmark::State& state) {
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(elicit::reference::baseline_w(39, 10, trials, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BaselineParallel(benchmark::State& state) {
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(elicit::kernels::baseline_w(39, 10, trials, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct Cohort {
  elicit::Dataset ds = elicit::make_sample_dataset();
  std::vector<elicit::RankingSheet> sheets;
  std::vector<elicit::ExpertHopRatings> ratings;
  std::vector<elicit::AggregationMethod> methods = elicit::all_methods();

  Cohort() {
    for (const auto& e : ds.experts) {
      sheets.push_back(*ds.find_sheet(e.id));
      ratings.push_back(elicit::collect_overall(ds.scenario, e.id, ds.responses));
    }
  }
};

const Cohort& cohort() {
  static const Cohort c;
  return c;
}

void BM_MethodCellsReference(benchmark::State& state) {
  const auto& c = cohort();
  for (auto _ : state) {
    benchmark::DoNotOptimize(elicit::reference::method_cells(c.sheets, c.ratings, c.ds.scenario, c.methods));
  }
}

void BM_MethodCellsParallel(benchmark::State& state) {
  const auto& c = cohort();
  for (auto _ : state) {
    benchmark::DoNotOptimize(elicit::kernels::method_cells(c.sheets, c.ratings, c.ds.scenario, c.methods));
  }
}

std::vector<double> random_matrix(std::size_t m, std::size_t n) {
  std::vector<double> matrix;
  for (const auto& sheet : elicit::random_rankings(m, n, 3)) {
    for (const auto& item : elicit::numbered_items(n)) matrix.push_back(sheet.ranks.at(item));
  }
  return matrix;
}

void BM_AgreementRowsReference(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto matrix = random_matrix(m, 10);
  const std::vector<double> consensus{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (auto _ : state) benchmark::DoNotOptimize(elicit::reference::agreement_rows(matrix, m, consensus));
}

void BM_AgreementRowsParallel(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto matrix = random_matrix(m, 10);
  const std::vector<double> consensus{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (auto _ : state) benchmark::DoNotOptimize(elicit::kernels::agreement_rows(matrix, m, consensus));
}

}  // namespace

BENCHMARK(BM_BaselineReference)->Arg(1000)->Arg(100000);
BENCHMARK(BM_BaselineParallel)->Arg(1000)->Arg(100000);
BENCHMARK(BM_MethodCellsReference);
BENCHMARK(BM_MethodCellsParallel);
BENCHMARK(BM_AgreementRowsReference)->Arg(39)->Arg(100000);
BENCHMARK(BM_AgreementRowsParallel)->Arg(39)->Arg(100000);

BENCHMARK_MAIN();
