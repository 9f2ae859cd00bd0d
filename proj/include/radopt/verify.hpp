#pragma once

#include <functional>
#include <string>
#include <vector>

#include "radopt/harness.hpp"
#include "radopt/manifold.hpp"
#include "radopt/problems.hpp"
#include "radopt/types.hpp"

namespace radopt {

using ScalarField = std::function<double(const Matrix&)>;
using GradientField = std::function<Matrix(const Matrix&)>;

/** Central-difference estimate of <grad f(x), eta> through the retraction:
 *  (f(R_x(t eta)) - f(R_x(-t eta))) / (2t). */
double fd_directional(const ScalarField& fn, const Manifold& manifold,
                      const Matrix& x, const Matrix& eta, double t);

/** Worst observed relative disagreement between a closed-form gradient and
 *  the finite-difference oracle over `trials` random (point, direction)
 *  pairs. */
double max_gradient_mismatch(const ScalarField& fn, const GradientField& grad,
                             const Manifold& manifold, int trials, double t,
                             std::mt19937_64& rng);

/** Empirical witness of the retraction-smoothness constant: the largest
 *  2|f(R_x(t eta)) - f(x) - t<grad f(x), eta>| / t² over `trials` random
 *  points and unit tangent directions. A lower bound of the true L. */
double estimate_L(const ScalarField& fn, const GradientField& grad,
                  const Manifold& manifold, int trials, double t,
                  std::mt19937_64& rng);

/** Empirical constants of the bounded-gradient assumption: B bounds the
 *  mini-batch gradient norms seen, G the full-gradient norms. The derived
 *  preconditioner eigenvalue bounds are mu = (B+eps)^-1 and nu = eps^-1. */
struct AnalysisBounds {
  double stochastic_bound = 0.0;  // B
  double full_bound = 0.0;        // G
  double epsilon = 1e-8;

  double mu() const { return 1.0 / (stochastic_bound + epsilon); }
  double nu() const { return 1.0 / epsilon; }
};

/** Measures B and G over `trials` random feasible points, sampling one
 *  mini-batch of size b per point for the stochastic bound. */
AnalysisBounds measure_bounds(const Problem& problem, int trials, long b,
                              double epsilon, std::mt19937_64& rng);

/** Running-average squared full-gradient norm plateaus per batch size,
 *  seed-averaged, plus a least-squares fit of plateau ≈ a/K + c/b. */
struct RateFit {
  std::vector<long> batch_sizes;
  std::vector<double> plateaus;
  long iterations = 0;
  double a = 0.0;
  double c = 0.0;
};

/**
 * Runs the method with beta1 = 0 (the analyzed momentum-free case) at a
 * constant step size for each batch size and K iterations, averaging the
 * running mean of the squared full-gradient norm over the seeds. Diverged
 * trials are excluded from the averages and the fit.
 */
RateFit rate_experiment(const Problem& train, const OptimizerSpec& base_spec,
                        const std::vector<long>& batch_sizes, long iterations,
                        const std::vector<uint64_t>& seeds);

/** Running mean of squared gnorm_train over per-iteration records. */
double mean_squared_gradient_norm(const std::vector<RunRecord>& records);

/** Plain-text + CSV verification report consumed by CI. */
struct VerificationReport {
  std::vector<std::string> lines;
  RateFit rates;

  void note(const std::string& line) { lines.push_back(line); }
  void write(const std::string& text_path, const std::string& csv_path) const;
};

}  // namespace radopt
