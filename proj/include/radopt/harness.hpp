#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "radopt/optimizer.hpp"
#include "radopt/problems.hpp"
#include "radopt/types.hpp"

namespace radopt {

/** One metrics row. Objectives and gradient norms are evaluated on the
 *  full train/test sets, never on the mini-batch. */
struct RunRecord {
  long k = 0;
  double alpha_k = 0.0;
  long b_k = 0;
  double f_train = 0.0;
  double f_test = 0.0;
  double gnorm_train = 0.0;
  double gnorm_test = 0.0;
  double elapsed_s = 0.0;
};

struct RunSettings {
  long max_iters = 1000;
  long cadence = 0;  // 0: every iteration up to 2000 rows, then ceil(K/2000)
  // With wall-clock capture off, elapsed_s is written as 0 so that reruns
  // of the same config produce byte-identical CSVs.
  bool record_walltime = true;
  double divergence_limit = 1e12;
  // When set, replaces the seeded random initial point.
  std::optional<Matrix> initial_point;
};

struct TrialResult {
  uint64_t seed = 0;
  std::vector<RunRecord> records;
  bool diverged = false;
  std::string abort_reason;

  double final_f_train() const {
    return records.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : records.back().f_train;
  }
  double final_gnorm_train() const {
    return records.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : records.back().gnorm_train;
  }
};

/** Effective metric cadence for a run of K iterations. */
long effective_cadence(const RunSettings& settings);

/**
 * Runs max_iters iterations of the adaptive framework on `train`,
 * recording full-set metrics (also on `test` when given) at the cadence.
 * The seed drives the initial point and every mini-batch draw, making the
 * trial deterministic. Divergence (non-finite or huge objective, poisoned
 * optimizer state, failed retraction) aborts the trial and marks it.
 */
TrialResult run_trial(const Problem& train, const Problem* test,
                      const OptimizerSpec& spec, uint64_t seed,
                      const RunSettings& settings);

/** Writes records with the exact header
 *  k,alpha_k,b_k,f_train,f_test,gnorm_train,gnorm_test,elapsed_s. */
void write_records_csv(const std::string& path,
                       const std::vector<RunRecord>& records);

/** First recorded iteration whose train full-gradient norm is below the
 *  threshold; empty when the run never gets there. */
std::optional<long> iterations_to_threshold(
    const std::vector<RunRecord>& records, double threshold);

struct GridResult {
  bool viable = false;
  double best_alpha = 0.0;
  // Per step size: mean final train objective over the seeds, NaN when
  // every seed diverged.
  std::vector<double> alphas;
  std::vector<double> mean_final_objective;
  std::vector<std::vector<TrialResult>> trials;  // [alpha][seed]
};

/**
 * Runs every (alpha, seed) trial and selects the step size with the lowest
 * mean final train objective; ties go to the smaller (more conservative)
 * alpha. Diverged trials never win; when everything diverges the result is
 * marked non-viable. Trials are independent and run on a small work pool.
 */
GridResult grid_search(const Problem& train, const Problem* test,
                       const OptimizerSpec& base_spec,
                       const std::vector<double>& alphas,
                       const std::vector<uint64_t>& seeds,
                       const RunSettings& settings);

}  // namespace radopt
