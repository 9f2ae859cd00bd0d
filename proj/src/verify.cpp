#include "radopt/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace radopt {

double fd_directional(const ScalarField& fn, const Manifold& manifold,
                      const Matrix& x, const Matrix& eta, double t) {
  if (!(t > 0.0)) throw ContractError("fd_directional: t must be positive");
  return (fn(manifold.retract(x, t * eta)) -
          fn(manifold.retract(x, -t * eta))) /
         (2.0 * t);
}

double max_gradient_mismatch(const ScalarField& fn, const GradientField& grad,
                             const Manifold& manifold, int trials, double t,
                             std::mt19937_64& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Matrix x = manifold.random_point(rng);
    Matrix eta = manifold.random_tangent(x, rng);
    const double norm = eta.norm();
    if (norm == 0.0) continue;
    eta /= norm;
    const double analytic = Manifold::inner(grad(x), eta);
    const double numeric = fd_directional(fn, manifold, x, eta, t);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  return worst;
}

double estimate_L(const ScalarField& fn, const GradientField& grad,
                  const Manifold& manifold, int trials, double t,
                  std::mt19937_64& rng) {
  if (trials < 1) throw ContractError("estimate_L: need at least one trial");
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Matrix x = manifold.random_point(rng);
    Matrix eta = manifold.random_tangent(x, rng);
    const double norm = eta.norm();
    if (norm == 0.0) continue;
    eta /= norm;
    const double gap = fn(manifold.retract(x, t * eta)) - fn(x) -
                       t * Manifold::inner(grad(x), eta);
    worst = std::max(worst, 2.0 * std::abs(gap) / (t * t));
  }
  return worst;
}

AnalysisBounds measure_bounds(const Problem& problem, int trials, long b,
                              double epsilon, std::mt19937_64& rng) {
  if (trials < 1)
    throw ContractError("measure_bounds: need at least one trial");
  AnalysisBounds bounds;
  bounds.epsilon = epsilon;
  for (int trial = 0; trial < trials; ++trial) {
    const Matrix x = problem.manifold().random_point(rng);
    bounds.full_bound =
        std::max(bounds.full_bound, problem.full_grad(x).norm());
    const auto batch = sample_batch(rng, problem.sample_count(), b);
    bounds.stochastic_bound = std::max(
        bounds.stochastic_bound, problem.minibatch_grad(x, batch).norm());
  }
  return bounds;
}

double mean_squared_gradient_norm(const std::vector<RunRecord>& records) {
  if (records.empty())
    throw ContractError("mean_squared_gradient_norm: no records");
  double sum = 0.0;
  for (const auto& r : records) sum += r.gnorm_train * r.gnorm_train;
  return sum / static_cast<double>(records.size());
}

RateFit rate_experiment(const Problem& train, const OptimizerSpec& base_spec,
                        const std::vector<long>& batch_sizes, long iterations,
                        const std::vector<uint64_t>& seeds) {
  if (batch_sizes.empty())
    throw ContractError("rate_experiment: empty batch-size list");
  if (seeds.empty()) throw ContractError("rate_experiment: no seeds");

  OptimizerSpec spec = base_spec;
  spec.beta1 = 0.0;  // the analyzed case: the moment map passes g through
  spec.step_schedule.kind = StepSchedule::Kind::Constant;

  RunSettings settings;
  settings.max_iters = iterations;
  settings.cadence = 1;
  settings.record_walltime = false;

  RateFit fit;
  fit.iterations = iterations;
  for (const long b : batch_sizes) {
    spec.batch_schedule = BatchSchedule::constant(b, train.sample_count());
    double sum = 0.0;
    long converged = 0;
    for (const uint64_t seed : seeds) {
      const TrialResult trial =
          run_trial(train, nullptr, spec, seed, settings);
      if (trial.diverged) continue;
      sum += mean_squared_gradient_norm(trial.records);
      ++converged;
    }
    fit.batch_sizes.push_back(b);
    fit.plateaus.push_back(converged > 0
                               ? sum / static_cast<double>(converged)
                               : std::numeric_limits<double>::quiet_NaN());
  }

  // Least squares for plateau ≈ a/K + c/b over the converged batch sizes.
  Eigen::MatrixX2d design(static_cast<Index>(fit.batch_sizes.size()), 2);
  Vector target(static_cast<Index>(fit.batch_sizes.size()));
  Index used = 0;
  for (size_t i = 0; i < fit.batch_sizes.size(); ++i) {
    if (!std::isfinite(fit.plateaus[i])) continue;
    design(used, 0) = 1.0 / static_cast<double>(iterations);
    design(used, 1) = 1.0 / static_cast<double>(fit.batch_sizes[i]);
    target(used) = fit.plateaus[i];
    ++used;
  }
  if (used >= 2) {
    const Eigen::Vector2d coeffs = design.topRows(used)
                                       .completeOrthogonalDecomposition()
                                       .solve(target.head(used));
    fit.a = coeffs(0);
    fit.c = coeffs(1);
  }
  return fit;
}

void VerificationReport::write(const std::string& text_path,
                               const std::string& csv_path) const {
  std::ofstream text(text_path);
  if (!text)
    throw FormatError("report: cannot open " + text_path + " for writing");
  for (const auto& line : lines) text << line << "\n";

  std::ofstream csv(csv_path);
  if (!csv)
    throw FormatError("report: cannot open " + csv_path + " for writing");
  csv << "batch_size,iterations,mean_sq_gnorm\n";
  char row[128];
  for (size_t i = 0; i < rates.batch_sizes.size(); ++i) {
    std::snprintf(row, sizeof row, "%ld,%ld,%.17g\n", rates.batch_sizes[i],
                  rates.iterations, rates.plateaus[i]);
    csv << row;
  }
}

}  // namespace radopt
