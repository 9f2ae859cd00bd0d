#include "radopt/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>

namespace radopt {

long effective_cadence(const RunSettings& settings) {
  if (settings.cadence > 0) return settings.cadence;
  if (settings.max_iters <= 2000) return 1;
  return (settings.max_iters + 1999) / 2000;
}

namespace {

void append_metrics(std::vector<RunRecord>& records, const Problem& train,
                    const Problem* test, const Matrix& x, long k, double alpha,
                    long b, double elapsed_s) {
  RunRecord row;
  row.k = k;
  row.alpha_k = alpha;
  row.b_k = b;
  row.f_train = train.value(x);
  row.gnorm_train = train.full_grad(x).norm();
  if (test != nullptr) {
    row.f_test = test->value(x);
    row.gnorm_test = test->full_grad(x).norm();
  }
  row.elapsed_s = elapsed_s;
  records.push_back(row);
}

}  // namespace

TrialResult run_trial(const Problem& train, const Problem* test,
                      const OptimizerSpec& spec, uint64_t seed,
                      const RunSettings& settings) {
  if (settings.max_iters < 1)
    throw ContractError("run_trial: max_iters must be >= 1");
  const Manifold& manifold = train.manifold();
  const long cadence = effective_cadence(settings);
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&]() {
    if (!settings.record_walltime) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  TrialResult result;
  result.seed = seed;
  std::mt19937_64 rng(seed);
  Matrix x = manifold.random_point(rng);
  if (settings.initial_point) {
    manifold.require_feasible(*settings.initial_point);
    x = *settings.initial_point;
  }
  AdaptiveState state(manifold.ambient_dim());
  try {
    for (long k = 1; k <= settings.max_iters; ++k) {
      const long b = batch_size(spec.batch_schedule, k);
      const double alpha = step_size(spec.step_schedule, k);
      if ((k - 1) % cadence == 0 || k == settings.max_iters) {
        append_metrics(result.records, train, test, x, k, alpha, b,
                       elapsed());
        const double f = result.records.back().f_train;
        if (!std::isfinite(f) || f > settings.divergence_limit) {
          result.diverged = true;
          result.abort_reason = "objective diverged";
          return result;
        }
      }
      const auto batch = sample_batch(rng, train.sample_count(), b);
      const Matrix g = train.minibatch_grad(x, batch);
      x = step(manifold, x, g, state, spec);
    }
  } catch (const NumericalError& err) {
    result.diverged = true;
    result.abort_reason = err.what();
  } catch (const FeasibilityError& err) {
    result.diverged = true;
    result.abort_reason = err.what();
  }
  return result;
}

void write_records_csv(const std::string& path,
                       const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out)
    throw FormatError("metrics: cannot open " + path + " for writing");
  out << "k,alpha_k,b_k,f_train,f_test,gnorm_train,gnorm_test,elapsed_s\n";
  char line[320];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line,
                  "%ld,%.17g,%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.k,
                  r.alpha_k, r.b_k, r.f_train, r.f_test, r.gnorm_train,
                  r.gnorm_test, r.elapsed_s);
    out << line;
  }
}

std::optional<long> iterations_to_threshold(
    const std::vector<RunRecord>& records, double threshold) {
  if (records.empty())
    throw ContractError("iterations_to_threshold: no records");
  for (const auto& r : records)
    if (r.gnorm_train < threshold) return r.k;
  return std::nullopt;
}

GridResult grid_search(const Problem& train, const Problem* test,
                       const OptimizerSpec& base_spec,
                       const std::vector<double>& alphas,
                       const std::vector<uint64_t>& seeds,
                       const RunSettings& settings) {
  if (alphas.empty()) throw ContractError("grid_search: empty step-size set");
  if (seeds.empty()) throw ContractError("grid_search: need at least one seed");

  GridResult result;
  result.alphas = alphas;
  result.trials.resize(alphas.size());
  result.mean_final_objective.assign(alphas.size(),
                                     std::numeric_limits<double>::quiet_NaN());

  std::vector<std::vector<std::future<TrialResult>>> futures(alphas.size());
  for (size_t a = 0; a < alphas.size(); ++a) {
    OptimizerSpec spec = base_spec;
    spec.step_schedule.alpha0 = alphas[a];
    for (const uint64_t seed : seeds)
      futures[a].push_back(std::async(std::launch::async, run_trial,
                                      std::cref(train), test, spec, seed,
                                      settings));
  }
  for (size_t a = 0; a < alphas.size(); ++a) {
    double sum = 0.0;
    bool all_converged = true;
    for (auto& f : futures[a]) {
      TrialResult trial = f.get();
      if (trial.diverged || !std::isfinite(trial.final_f_train()))
        all_converged = false;
      else
        sum += trial.final_f_train();
      result.trials[a].push_back(std::move(trial));
    }
    if (all_converged)
      result.mean_final_objective[a] = sum / static_cast<double>(seeds.size());
  }

  size_t best = alphas.size();
  for (size_t a = 0; a < alphas.size(); ++a) {
    const double score = result.mean_final_objective[a];
    if (!std::isfinite(score)) continue;
    if (best == alphas.size() || score < result.mean_final_objective[best] ||
        (score == result.mean_final_objective[best] &&
         alphas[a] < alphas[best]))
      best = a;
  }
  if (best < alphas.size()) {
    result.viable = true;
    result.best_alpha = alphas[best];
  }
  return result;
}

}  // namespace radopt
