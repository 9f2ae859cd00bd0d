#pragma once

#include <cstdint>

#include "radopt/manifold.hpp"
#include "radopt/types.hpp"

namespace radopt {

enum class Method { Rsgd, RAdaGrad, RRmsProp, RAdam, RAmsGrad };

Method method_from_name(const std::string& name);
const char* method_name(Method method);

/** Step-size sequence: alpha0 for every iteration, or alpha0/sqrt(k). */
struct StepSchedule {
  enum class Kind { Constant, Diminishing };
  Kind kind = Kind::Constant;
  double alpha0 = 1e-3;

  static StepSchedule constant(double alpha0);
  static StepSchedule diminishing(double alpha0);
};

/** alpha_k for iteration k >= 1. Throws ContractError for k < 1. */
double step_size(const StepSchedule& schedule, long k);

/** Mini-batch-size sequence. Constant keeps b0; Exponential multiplies by
 *  delta every `period` iterations, i.e. b_k = floor(delta^floor(k/period)
 *  * b0). Both are clamped to [1, cap]. */
struct BatchSchedule {
  enum class Kind { Constant, Exponential };
  Kind kind = Kind::Constant;
  long b0 = 1;
  double delta = 2.0;
  long period = 1;
  long cap = 1L << 62;

  static BatchSchedule constant(long b0, long cap);
  static BatchSchedule exponential(long b0, double delta, long period,
                                   long cap);
};

/** b_k for iteration k >= 1; nondecreasing for the exponential kind. */
long batch_size(const BatchSchedule& schedule, long k);

/** One fully configured method instance. */
struct OptimizerSpec {
  Method method = Method::RAmsGrad;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  StepSchedule step_schedule;
  BatchSchedule batch_schedule;
  // Bias-correction exponent for RAdam. The update here divides by
  // 1 - beta^(k+1) at iteration k; set false for the conventional
  // 1 - beta^k form.
  bool shifted_bias_exponent = true;
};

/** Per-coordinate moment accumulators over the flattened (column-major)
 *  ambient coordinates, plus the 1-based iteration counter. A single run
 *  owns one state; it is mutated sequentially by one writer. */
struct AdaptiveState {
  Vector m;
  Vector v;
  Vector v_hat;
  long k = 1;

  explicit AdaptiveState(Index dim)
      : m(Vector::Zero(dim)), v(Vector::Zero(dim)),
        v_hat(Vector::Zero(dim)) {}
};

/** Positive diagonal preconditioner H_k, stored as its diagonal. */
struct Preconditioner {
  Vector diag;
};

/**
 * First-moment map: returns the search-direction numerator for iteration
 * state.k given the flattened gradient g. Updates state.m for the
 * EMA-based methods; the others pass g through unchanged. RAdam divides by
 * its bias-correction factor, RAmsGrad does not.
 * Throws NumericalError when g is non-finite (the run must abort).
 */
Vector moment_update(const OptimizerSpec& spec, AdaptiveState& state,
                     const Vector& g);

/**
 * Second-moment map: returns the diagonal of H_k given the flattened
 * gradient g, updating state.v (and state.v_hat for RAmsGrad, which takes
 * the elementwise running maximum). Every diagonal entry is
 * sqrt(second-moment statistic) + epsilon > 0; Rsgd yields all ones.
 */
Preconditioner precond_update(const OptimizerSpec& spec, AdaptiveState& state,
                              const Vector& g);

/**
 * One iteration x_{k+1} = R_x(-alpha_k P_x(H_k^{-1} m_k)) of the adaptive
 * framework. `riem_grad` must be the (mini-batch) Riemannian gradient at x.
 * H_k^{-1} acts elementwise on the flattened ambient coordinates of m_k;
 * only the final direction is projected. Advances state.k.
 */
Matrix step(const Manifold& manifold, const Matrix& x, const Matrix& riem_grad,
            AdaptiveState& state, const OptimizerSpec& spec);

/** Flatten ambient coordinates column-major (Eigen storage order). */
Vector flatten(const Matrix& m);
Matrix unflatten(const Vector& v, Index rows, Index cols);

}  // namespace radopt
