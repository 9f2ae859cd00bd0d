// Command-line experiment runner: configures a problem and an optimizer,
// runs seeded trials, and writes per-iteration metric CSVs. Subcommands:
//   run    one method at one step size
//   grid   step-size grid search
//   table  iterations-to-threshold across methods and batch sizes

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radopt/data.hpp"
#include "radopt/harness.hpp"
#include "radopt/optimizer.hpp"
#include "radopt/problems.hpp"

namespace {

using namespace radopt;

struct CommonOptions {
  std::string problem = "pca";
  std::string data = "synth:n=20,p_true=3,N=640,noise=0.1,seed=17";
  std::string method = "ramsgrad";
  std::string step = "constant";
  double alpha = 1e-3;
  long batch = 64;
  std::string batch_schedule;  // "exp:<delta>:<period>" switches to growth
  long iters = 1000;
  std::string seeds = "1,2,3";
  double threshold = 0.0;
  std::string out = "out";
  long rank = 3;
  double train_fraction = 0.8;
  uint64_t split_seed = 0;
  long cadence = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool no_timing = false;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--problem", opt.problem, "Objective family")
      ->check(CLI::IsMember({"pca", "lrmc"}));
  cmd->add_option("--data", opt.data,
                  "Dataset: a file path (.idx, dense CSV, or ratings CSV) or "
                  "synth:key=value,... (pca keys n,p_true,N,noise,seed; lrmc "
                  "keys n,N,p_true,obs,noise,seed)");
  cmd->add_option("--method", opt.method, "Optimizer")
      ->check(CLI::IsMember(
          {"rsgd", "radagrad", "rrmsprop", "radam", "ramsgrad"}));
  cmd->add_option("--step", opt.step, "Step-size schedule")
      ->check(CLI::IsMember({"constant", "diminishing"}));
  cmd->add_option("--alpha", opt.alpha, "Initial step size");
  cmd->add_option("--batch", opt.batch, "Mini-batch size b (or b0)");
  cmd->add_option("--batch-schedule", opt.batch_schedule,
                  "exp:<delta>:<period> multiplies the batch size by delta "
                  "every <period> iterations");
  cmd->add_option("--iters", opt.iters, "Iteration budget K");
  cmd->add_option("--seeds", opt.seeds, "Comma-separated trial seeds");
  cmd->add_option("--threshold", opt.threshold,
                  "Gradient-norm threshold for iteration counts");
  cmd->add_option("--out", opt.out, "Output directory for metric CSVs");
  cmd->add_option("--p", opt.rank, "Target rank / subspace dimension");
  cmd->add_option("--train-fraction", opt.train_fraction,
                  "Train share of the dataset split");
  cmd->add_option("--split-seed", opt.split_seed, "Seed for the split");
  cmd->add_option("--cadence", opt.cadence,
                  "Record metrics every this many iterations (0 = auto)");
  cmd->add_option("--beta1", opt.beta1, "First-moment decay");
  cmd->add_option("--beta2", opt.beta2, "Second-moment decay");
  cmd->add_option("--epsilon", opt.epsilon, "Preconditioner floor");
  cmd->add_flag("--no-timing", opt.no_timing,
                "Write elapsed_s as 0 so reruns are byte-identical");
  cmd->set_config("--config", "",
                  "Flat key=value file mirroring these flags; command-line "
                  "flags take precedence");
}

std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ','))
    if (!token.empty()) seeds.push_back(std::stoull(token));
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "need >= 1 seed");
  return seeds;
}

std::map<std::string, double> parse_synth_spec(const std::string& spec) {
  std::map<std::string, double> params;
  std::stringstream stream(spec.substr(std::string("synth:").size()));
  std::string token;
  while (std::getline(stream, token, ',')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--data", "expected key=value in " + token);
    params[token.substr(0, eq)] = std::stod(token.substr(eq + 1));
  }
  return params;
}

double synth_param(const std::map<std::string, double>& params,
                   const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

bool ends_with(const std::string& text, const std::string& suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) ==
             0;
}

struct LoadedProblem {
  std::unique_ptr<Problem> train;
  std::unique_ptr<Problem> test;
};

LoadedProblem load_problem(const CommonOptions& opt) {
  LoadedProblem loaded;
  if (opt.problem == "pca") {
    DenseDataset dataset;
    if (opt.data.rfind("synth:", 0) == 0) {
      const auto params = parse_synth_spec(opt.data);
      dataset = synth_pca(static_cast<Index>(synth_param(params, "n", 20)),
                          static_cast<Index>(synth_param(params, "p_true", 3)),
                          static_cast<Index>(synth_param(params, "N", 640)),
                          synth_param(params, "noise", 0.0),
                          static_cast<uint64_t>(synth_param(params, "seed", 0)));
    } else if (ends_with(opt.data, ".idx")) {
      dataset = read_idx(opt.data);
    } else {
      dataset = read_dense_csv(opt.data);
    }
    auto [train, test] = split(dataset, opt.train_fraction, opt.split_seed);
    loaded.train = std::make_unique<PcaProblem>(train.samples, opt.rank);
    loaded.test = std::make_unique<PcaProblem>(test.samples, opt.rank);
    return loaded;
  }
  SparseRatings ratings;
  if (opt.data.rfind("synth:", 0) == 0) {
    const auto params = parse_synth_spec(opt.data);
    ratings = synth_lrmc(static_cast<Index>(synth_param(params, "n", 30)),
                         static_cast<Index>(synth_param(params, "N", 75)),
                         static_cast<Index>(synth_param(params, "p_true", 3)),
                         synth_param(params, "obs", 0.5),
                         synth_param(params, "noise", 0.0),
                         static_cast<uint64_t>(synth_param(params, "seed", 0)));
  } else {
    ratings = read_ratings_csv(opt.data);
  }
  auto [train, test] = split(ratings, opt.train_fraction, opt.split_seed);
  loaded.train =
      std::make_unique<LrmcProblem>(train.rows, to_columns(train), opt.rank);
  loaded.test =
      std::make_unique<LrmcProblem>(test.rows, to_columns(test), opt.rank);
  return loaded;
}

OptimizerSpec make_spec(const CommonOptions& opt, Index n_train) {
  OptimizerSpec spec;
  spec.method = method_from_name(opt.method);
  spec.beta1 = opt.beta1;
  spec.beta2 = opt.beta2;
  spec.epsilon = opt.epsilon;
  spec.step_schedule = opt.step == "constant"
                           ? StepSchedule::constant(opt.alpha)
                           : StepSchedule::diminishing(opt.alpha);
  if (opt.batch_schedule.empty()) {
    spec.batch_schedule = BatchSchedule::constant(opt.batch, n_train);
  } else {
    double delta = 2.0;
    long period = 100;
    if (std::sscanf(opt.batch_schedule.c_str(), "exp:%lf:%ld", &delta,
                    &period) != 2)
      throw CLI::ValidationError("--batch-schedule",
                                 "expected exp:<delta>:<period>");
    spec.batch_schedule =
        BatchSchedule::exponential(opt.batch, delta, period, n_train);
  }
  return spec;
}

RunSettings make_settings(const CommonOptions& opt) {
  RunSettings settings;
  settings.max_iters = opt.iters;
  settings.cadence = opt.cadence;
  settings.record_walltime = !opt.no_timing;
  return settings;
}

std::string csv_path(const CommonOptions& opt, const std::string& tag,
                     uint64_t seed) {
  std::ostringstream os;
  os << opt.out << "/" << tag << "_seed" << seed << ".csv";
  return os.str();
}

int command_run(const CommonOptions& opt) {
  const auto loaded = load_problem(opt);
  const auto spec = make_spec(opt, loaded.train->sample_count());
  const auto settings = make_settings(opt);
  const auto seeds = parse_seeds(opt.seeds);
  std::filesystem::create_directories(opt.out);

  for (const uint64_t seed : seeds) {
    const TrialResult trial =
        run_trial(*loaded.train, loaded.test.get(), spec, seed, settings);
    const std::string path =
        csv_path(opt, opt.method + "_" + opt.problem, seed);
    write_records_csv(path, trial.records);
    std::cout << "seed " << seed << ": ";
    if (trial.diverged) {
      std::cout << "diverged (" << trial.abort_reason << ")";
    } else {
      std::cout << "f_train " << trial.final_f_train() << ", gnorm_train "
                << trial.final_gnorm_train();
      if (opt.threshold > 0.0) {
        const auto hit =
            iterations_to_threshold(trial.records, opt.threshold);
        std::cout << ", iters_to_threshold "
                  << (hit ? std::to_string(*hit) : std::string("-"));
      }
    }
    std::cout << " -> " << path << "\n";
  }
  return 0;
}

int command_grid(const CommonOptions& opt, const std::string& alphas_text) {
  const auto loaded = load_problem(opt);
  auto spec = make_spec(opt, loaded.train->sample_count());
  const auto settings = make_settings(opt);
  const auto seeds = parse_seeds(opt.seeds);
  std::vector<double> alphas;
  {
    std::stringstream stream(alphas_text);
    std::string token;
    while (std::getline(stream, token, ','))
      if (!token.empty()) alphas.push_back(std::stod(token));
  }
  if (alphas.empty())
    throw CLI::ValidationError("--alphas", "need >= 1 step size");
  std::filesystem::create_directories(opt.out);

  const GridResult grid =
      grid_search(*loaded.train, loaded.test.get(), spec, alphas, seeds,
                  settings);
  for (size_t a = 0; a < grid.alphas.size(); ++a) {
    for (const auto& trial : grid.trials[a]) {
      std::ostringstream tag;
      tag << opt.method << "_" << opt.problem << "_alpha" << grid.alphas[a];
      write_records_csv(csv_path(opt, tag.str(), trial.seed), trial.records);
    }
    std::cout << "alpha " << grid.alphas[a] << ": mean final f_train ";
    if (std::isfinite(grid.mean_final_objective[a]))
      std::cout << grid.mean_final_objective[a] << "\n";
    else
      std::cout << "diverged\n";
  }
  if (!grid.viable) {
    std::cout << "no viable step size\n";
    return 1;
  }
  std::cout << "best alpha " << grid.best_alpha << "\n";
  return 0;
}

int command_table(const CommonOptions& opt, const std::string& methods_text,
                  const std::string& batches_text) {
  if (!(opt.threshold > 0.0))
    throw CLI::ValidationError("--threshold",
                               "table needs a positive threshold");
  const auto loaded = load_problem(opt);
  const auto settings = make_settings(opt);
  const auto seeds = parse_seeds(opt.seeds);

  std::vector<std::string> methods;
  {
    std::stringstream stream(methods_text);
    std::string token;
    while (std::getline(stream, token, ','))
      if (!token.empty()) methods.push_back(token);
  }
  std::vector<long> batches;
  {
    std::stringstream stream(batches_text);
    std::string token;
    while (std::getline(stream, token, ','))
      if (!token.empty()) batches.push_back(std::stol(token));
  }
  std::filesystem::create_directories(opt.out);
  std::ofstream table_csv(opt.out + "/table.csv");
  table_csv << "method,b,mean_iters_to_threshold,mean_final_gnorm\n";

  std::printf("%-10s %6s  %18s  %14s\n", "method", "b", "iters_to_threshold",
              "final_gnorm");
  for (const auto& method : methods) {
    for (const long b : batches) {
      CommonOptions local = opt;
      local.method = method;
      local.batch = b;
      const auto spec = make_spec(local, loaded.train->sample_count());
      double iter_sum = 0.0, gnorm_sum = 0.0;
      bool all_reached = true;
      for (const uint64_t seed : seeds) {
        const TrialResult trial =
            run_trial(*loaded.train, loaded.test.get(), spec, seed, settings);
        const auto hit = trial.diverged
                             ? std::nullopt
                             : iterations_to_threshold(trial.records,
                                                       opt.threshold);
        if (hit)
          iter_sum += static_cast<double>(*hit);
        else
          all_reached = false;
        gnorm_sum += trial.diverged ? std::numeric_limits<double>::quiet_NaN()
                                    : trial.final_gnorm_train();
      }
      const double denom = static_cast<double>(seeds.size());
      if (all_reached) {
        std::printf("%-10s %6ld  %18.1f  %14.6g\n", method.c_str(), b,
                    iter_sum / denom, gnorm_sum / denom);
        table_csv << method << "," << b << "," << iter_sum / denom << ","
                  << gnorm_sum / denom << "\n";
      } else {
        std::printf("%-10s %6ld  %18s  %14.6g\n", method.c_str(), b, "-",
                    gnorm_sum / denom);
        table_csv << method << "," << b << ",-," << gnorm_sum / denom << "\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian adaptive stochastic optimization experiments"};
  app.require_subcommand(1);

  CommonOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run one configuration");
  add_common_options(run_cmd, run_opt);

  CommonOptions grid_opt;
  std::string alphas_text =
      "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8";
  auto* grid_cmd =
      app.add_subcommand("grid", "Search the initial step size");
  add_common_options(grid_cmd, grid_opt);
  grid_cmd->add_option("--alphas", alphas_text,
                       "Comma-separated candidate step sizes");

  CommonOptions table_opt;
  std::string methods_text = "rsgd,radam,ramsgrad";
  std::string batches_text = "64,256,1024";
  auto* table_cmd = app.add_subcommand(
      "table", "Iterations-to-threshold across methods and batch sizes");
  add_common_options(table_cmd, table_opt);
  table_cmd->add_option("--methods", methods_text, "Methods to tabulate");
  table_cmd->add_option("--batches", batches_text, "Batch sizes to tabulate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return command_run(run_opt);
    if (grid_cmd->parsed()) return command_grid(grid_opt, alphas_text);
    if (table_cmd->parsed())
      return command_table(table_opt, methods_text, batches_text);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
