// elicit: command-line front end for validating datasets, producing analysis
// reports, inspecting hop-derived rankings, computing random baselines and
// running the survey service.
//
// Exit codes: 0 ok, 1 validation failure, 2 analysis error, 3 I/O error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include "elicit/consensus.hpp"
#include "elicit/dataset.hpp"
#include "elicit/error.hpp"
#include "elicit/kernels.hpp"
#include "elicit/report.hpp"
#include "elicit/sample.hpp"
#include "elicit/survey.hpp"

namespace {

enum ExitCode : int { kOk = 0, kValidation = 1, kAnalysis = 2, kIo = 3 };

namespace fs = std::filesystem;

// A bad option value; reported like a command-line parse error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Fn>
auto option_value(Fn&& fn) {
  try {
    return fn();
  } catch (const elicit::InputError& e) {
    throw UsageError(e.what());
  }
}

std::vector<fs::path> to_paths(const std::vector<std::string>& args) {
  return {args.begin(), args.end()};
}

// Runs `fn`, mapping the library's exception types onto exit codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const elicit::DatasetValidationError& e) {
    std::cerr << e.what() << "\n";
    return kValidation;
  } catch (const elicit::DatasetIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const elicit::MissingResponseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysis;
  } catch (const elicit::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysis;
  }
}

int cmd_validate(const std::vector<std::string>& inputs) {
  const auto paths = to_paths(inputs);
  const auto result = elicit::load_dataset_unchecked(paths);
  if (!result.violations.empty()) {
    for (const auto& v : result.violations) std::cout << elicit::to_string(v) << "\n";
    std::cout << result.violations.size() << " violation(s)\n";
    return kValidation;
  }
  const auto& ds = result.dataset;
  std::cout << fmt::format("ok: {} attack vectors, {} hops, {} experts, {} ranking sheets, {} intervals\n",
                           ds.scenario.avs.size(), ds.scenario.hops.size(), ds.experts.size(),
                           ds.rankings.size(), ds.responses.size());
  return kOk;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::uint64_t seed = 1;
  std::string methods;
  std::string thresholds;
  std::size_t trials = 1000;
  std::string hop_group;
};

elicit::OutlierThresholds parse_thresholds(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw elicit::InputError("--thresholds expects strong,weak");
  elicit::OutlierThresholds t;
  try {
    t.strong = std::stod(text.substr(0, comma));
    t.weak = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw elicit::InputError("--thresholds expects two numbers");
  }
  if (t.weak > t.strong) throw elicit::InputError("weak threshold exceeds strong threshold");
  return t;
}

int cmd_report(const ReportArgs& args) {
  elicit::ReportConfig config;
  config.seed = args.seed;
  config.baseline_trials = args.trials;
  config.hop_group = args.hop_group;
  if (!args.methods.empty()) {
    config.methods = option_value([&] { return elicit::parse_methods(args.methods); });
  }
  if (!args.thresholds.empty()) {
    config.thresholds = option_value([&] { return parse_thresholds(args.thresholds); });
  }

  const auto paths = to_paths(args.inputs);
  const auto ds = elicit::load_dataset(paths);
  const auto report = elicit::run_report(ds, config);
  elicit::write_report(report, args.out);

  std::cout << "report written to " << args.out << "\n";
  const auto sections = {std::pair{"consensus", &report.consensus_status},
                         std::pair{"expert agreement", &report.agreement_status},
                         std::pair{"outliers", &report.outlier_status},
                         std::pair{"groups", &report.group_status},
                         std::pair{"agreement matrices", &report.matrix_status},
                         std::pair{"scatter", &report.scatter_status},
                         std::pair{"method comparison", &report.method_status},
                         std::pair{"baseline", &report.baseline_status}};
  for (const auto& [name, status] : sections) {
    if (!status->available) std::cout << "  " << name << ": unavailable (" << status->reason << ")\n";
  }
  return kOk;
}

int cmd_derive(const std::vector<std::string>& inputs, const std::string& expert_id, const std::string& method_text) {
  const auto method = option_value([&] { return elicit::parse_method(method_text); });
  const auto paths = to_paths(inputs);
  const auto ds = elicit::load_dataset(paths);
  if (!ds.find_expert(expert_id)) throw elicit::InputError("unknown expert '" + expert_id + "'");

  const auto ratings = elicit::collect_overall(ds.scenario, expert_id, ds.responses);
  const auto scores = elicit::av_scores(method, ratings, ds.scenario);
  const auto derived = elicit::ranks_from_scores(scores, elicit::Direction::Ascending);
  const auto* sheet = ds.find_sheet(expert_id);

  std::cout << fmt::format("expert {} method {}\n", expert_id, elicit::to_string(method));
  std::cout << fmt::format("{:<12} {:>10} {:>8} {:>8}\n", "av", "score", "derived", "actual");
  for (const auto& av : ds.scenario.avs) {
    const auto actual = sheet ? std::to_string(sheet->ranks.at(av.id)) : std::string("-");
    std::cout << fmt::format("{:<12} {:>10.3f} {:>8} {:>8}\n", av.id, scores.at(av.id),
                             fmt::format("{}", derived.at(av.id)), actual);
  }
  std::cout << fmt::format("tied attack vectors: {}\n", elicit::count_tied(scores));
  if (sheet) {
    std::optional<double> rho;
    if (derived.size() > 1) rho = elicit::spearman_rho(derived, elicit::Ranking::from_sheet(*sheet));
    std::cout << "rho(derived, actual): " << (rho ? fmt::format("{:.4f}", *rho) : "undefined") << "\n";
  }
  return kOk;
}

int cmd_baseline(std::size_t m, std::size_t n, std::size_t trials, std::uint64_t seed) {
  const auto ws = elicit::kernels::baseline_w(m, n, trials, seed);
  if (ws.empty()) throw elicit::InputError("--trials must be at least 1");
  const double mean = std::accumulate(ws.begin(), ws.end(), 0.0) / static_cast<double>(ws.size());
  double ss = 0.0;
  for (double w : ws) ss += (w - mean) * (w - mean);
  const auto [lo, hi] = std::minmax_element(ws.begin(), ws.end());
  std::cout << fmt::format("m={} n={} trials={} seed={}\n", m, n, trials, seed);
  std::cout << fmt::format("mean_w={:.6f} sd_w={:.6f} min_w={:.6f} max_w={:.6f}\n", mean,
                           ws.size() > 1 ? std::sqrt(ss / static_cast<double>(ws.size() - 1)) : 0.0, *lo, *hi);
  return kOk;
}

struct ServeArgs {
  std::vector<std::string> inputs;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store;
  std::string admin_token;
  std::string require;
};

int cmd_serve(ServeArgs args) {
  const auto paths = to_paths(args.inputs);
  const auto ds = elicit::load_dataset(paths);
  if (args.admin_token.empty()) {
    if (const char* env = std::getenv("ELICIT_ADMIN_TOKEN")) args.admin_token = env;
  }
  elicit::survey::StoreConfig store_config{args.store, {}};
  for (std::size_t start = 0; start < args.require.size();) {
    const auto comma = args.require.find(',', start);
    const auto q = args.require.substr(start, comma - start);
    if (!q.empty()) store_config.required_questions.push_back(q);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  elicit::survey::SurveyStore store(ds.scenario, ds.experts, store_config);
  elicit::survey::SurveyServer server(store, {args.host, args.port, args.admin_token});

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  std::cout << fmt::format("serving scenario '{}' on {}:{} ({} sessions in {})\n", ds.scenario.id, args.host,
                           args.port, store.session_count(), args.store);
  if (args.admin_token.empty()) std::cout << "export disabled: no admin token configured\n";
  std::cout.flush();
  const bool ok = server.listen();
  if (!ok) {
    std::cerr << "error: cannot listen on " << args.host << ":" << args.port << "\n";
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  return ok ? kOk : kIo;
}

int cmd_sample(const std::string& out, std::uint64_t seed, bool csv) {
  auto ds = elicit::make_sample_dataset(seed);
  if (csv) {
    fs::create_directories(out);
    elicit::write_text_file(fs::path(out) / "rankings.csv", elicit::rankings_to_csv(ds.rankings));
    ds.rankings.clear();
  }
  elicit::save_dataset(ds, out);
  std::cout << "sample dataset written to " << out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expert elicitation analysis toolkit"};
  app.require_subcommand(1);

  std::vector<std::string> validate_inputs;
  auto* validate = app.add_subcommand("validate", "Check a dataset against every structural invariant");
  validate->add_option("paths", validate_inputs, "Dataset files or directories")->required();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Compute every analysis table and write CSV/JSON/Markdown");
  report->add_option("paths", report_args.inputs, "Dataset files or directories")->required();
  report->add_option("--out", report_args.out, "Output directory")->required();
  report->add_option("--seed", report_args.seed, "Seed for the random baselines");
  report->add_option("--methods", report_args.methods, "Comma-separated <operator>:<statistic> list");
  report->add_option("--thresholds", report_args.thresholds, "Outlier thresholds strong,weak (default 0.7,0.3)");
  report->add_option("--trials", report_args.trials, "Random cohorts in the baseline");
  report->add_option("--hop-group", report_args.hop_group, "Limit the method comparison to one group");

  std::vector<std::string> derive_inputs;
  std::string derive_expert;
  std::string derive_method = "mean:mid";
  auto* derive = app.add_subcommand("derive", "Show one expert's hop-derived attack vector ranking");
  derive->add_option("paths", derive_inputs, "Dataset files or directories")->required();
  derive->add_option("--expert", derive_expert, "Expert id")->required();
  derive->add_option("--method", derive_method, "<operator>:<statistic>, e.g. owa-linear:mid");

  std::size_t base_m = 6, base_n = 10, base_trials = 1000;
  std::uint64_t base_seed = 1;
  auto* baseline = app.add_subcommand("baseline", "Kendall's W of uniformly random ranking cohorts");
  baseline->add_option("--m", base_m, "Rankings per cohort")->check(CLI::Range(2, 1 << 20));
  baseline->add_option("--n", base_n, "Items per ranking")->check(CLI::Range(2, 1 << 20));
  baseline->add_option("--trials", base_trials, "Number of cohorts")->check(CLI::Range(1, 1 << 26));
  baseline->add_option("--seed", base_seed, "Seed");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the survey HTTP service");
  serve->add_option("paths", serve_args.inputs, "Scenario and expert roster files")->required();
  serve->add_option("--port", serve_args.port, "TCP port");
  serve->add_option("--host", serve_args.host, "Bind address");
  serve->add_option("--store", serve_args.store, "Session store directory")->required();
  serve->add_option("--admin-token", serve_args.admin_token, "Token for GET /export (or ELICIT_ADMIN_TOKEN)");
  serve->add_option("--require", serve_args.require, "Question ids each hop must be answered for (default all)");

  std::string sample_out;
  std::uint64_t sample_seed = elicit::kSampleSeed;
  bool sample_csv = false;
  auto* sample = app.add_subcommand("sample", "Write the synthetic 39-expert sample dataset");
  sample->add_option("--out", sample_out, "Output directory")->required();
  sample->add_option("--seed", sample_seed, "Generator seed");
  sample->add_flag("--csv-rankings", sample_csv, "Write ranking sheets as rankings.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (*validate) return guarded([&] { return cmd_validate(validate_inputs); });
  if (*report) return guarded([&] { return cmd_report(report_args); });
  if (*derive) return guarded([&] { return cmd_derive(derive_inputs, derive_expert, derive_method); });
  if (*baseline) return guarded([&] { return cmd_baseline(base_m, base_n, base_trials, base_seed); });
  if (*serve) return guarded([&] { return cmd_serve(serve_args); });
  if (*sample) return guarded([&] { return cmd_sample(sample_out, sample_seed, sample_csv); });
  return kOk;
}
