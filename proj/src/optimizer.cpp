#include "radopt/optimizer.hpp"

#include <cmath>
#include <sstream>

namespace radopt {

Method method_from_name(const std::string& name) {
  if (name == "rsgd") return Method::Rsgd;
  if (name == "radagrad") return Method::RAdaGrad;
  if (name == "rrmsprop") return Method::RRmsProp;
  if (name == "radam") return Method::RAdam;
  if (name == "ramsgrad") return Method::RAmsGrad;
  throw ContractError("unknown method: " + name);
}

const char* method_name(Method method) {
  switch (method) {
    case Method::Rsgd: return "rsgd";
    case Method::RAdaGrad: return "radagrad";
    case Method::RRmsProp: return "rrmsprop";
    case Method::RAdam: return "radam";
    case Method::RAmsGrad: return "ramsgrad";
  }
  return "unknown";
}

StepSchedule StepSchedule::constant(double alpha0) {
  return StepSchedule{Kind::Constant, alpha0};
}

StepSchedule StepSchedule::diminishing(double alpha0) {
  return StepSchedule{Kind::Diminishing, alpha0};
}

double step_size(const StepSchedule& schedule, long k) {
  if (k < 1) throw ContractError("step_size: iteration index must be >= 1");
  if (!(schedule.alpha0 > 0.0))
    throw ContractError("step_size: alpha0 must be positive");
  switch (schedule.kind) {
    case StepSchedule::Kind::Constant: return schedule.alpha0;
    case StepSchedule::Kind::Diminishing:
      return schedule.alpha0 / std::sqrt(static_cast<double>(k));
  }
  return schedule.alpha0;
}

BatchSchedule BatchSchedule::constant(long b0, long cap) {
  BatchSchedule s;
  s.kind = Kind::Constant;
  s.b0 = b0;
  s.cap = cap;
  return s;
}

BatchSchedule BatchSchedule::exponential(long b0, double delta, long period,
                                         long cap) {
  BatchSchedule s;
  s.kind = Kind::Exponential;
  s.b0 = b0;
  s.delta = delta;
  s.period = period;
  s.cap = cap;
  return s;
}

long batch_size(const BatchSchedule& schedule, long k) {
  if (k < 1) throw ContractError("batch_size: iteration index must be >= 1");
  if (schedule.b0 < 1) throw ContractError("batch_size: b0 must be >= 1");
  if (schedule.cap < 1) throw ContractError("batch_size: cap must be >= 1");
  long b = schedule.b0;
  if (schedule.kind == BatchSchedule::Kind::Exponential) {
    if (!(schedule.delta > 1.0))
      throw ContractError("batch_size: delta must exceed 1");
    if (schedule.period < 1)
      throw ContractError("batch_size: period must be >= 1");
    const double growth = std::pow(schedule.delta,
                                   static_cast<double>(k / schedule.period));
    const double grown = growth * static_cast<double>(schedule.b0);
    b = grown >= static_cast<double>(schedule.cap)
            ? schedule.cap
            : static_cast<long>(std::floor(grown));
  }
  return std::min(std::max(b, 1L), schedule.cap);
}

namespace {

void require_finite(const Vector& g) {
  if (!g.allFinite())
    throw NumericalError("optimizer: non-finite gradient, aborting run");
}

double bias_factor(double beta, long k, bool shifted) {
  const double exponent = static_cast<double>(shifted ? k + 1 : k);
  return 1.0 - std::pow(beta, exponent);
}

}  // namespace

Vector moment_update(const OptimizerSpec& spec, AdaptiveState& state,
                     const Vector& g) {
  require_finite(g);
  if (state.k < 1) throw ContractError("moment_update: state.k must be >= 1");
  switch (spec.method) {
    case Method::Rsgd:
    case Method::RAdaGrad:
    case Method::RRmsProp:
      return g;
    case Method::RAdam:
      state.m = spec.beta1 * state.m + (1.0 - spec.beta1) * g;
      return state.m /
             bias_factor(spec.beta1, state.k, spec.shifted_bias_exponent);
    case Method::RAmsGrad:
      state.m = spec.beta1 * state.m + (1.0 - spec.beta1) * g;
      return state.m;
  }
  return g;
}

Preconditioner precond_update(const OptimizerSpec& spec, AdaptiveState& state,
                              const Vector& g) {
  require_finite(g);
  if (state.k < 1) throw ContractError("precond_update: state.k must be >= 1");
  Preconditioner h;
  switch (spec.method) {
    case Method::Rsgd:
      h.diag = Vector::Ones(g.size());
      return h;
    case Method::RAdaGrad:
      state.v += g.cwiseProduct(g);
      h.diag = state.v.cwiseSqrt().array() + spec.epsilon;
      return h;
    case Method::RRmsProp:
      state.v = spec.beta2 * state.v + (1.0 - spec.beta2) * g.cwiseProduct(g);
      h.diag = state.v.cwiseSqrt().array() + spec.epsilon;
      return h;
    case Method::RAdam: {
      state.v = spec.beta2 * state.v + (1.0 - spec.beta2) * g.cwiseProduct(g);
      const Vector corrected =
          state.v /
          bias_factor(spec.beta2, state.k, spec.shifted_bias_exponent);
      h.diag = corrected.cwiseSqrt().array() + spec.epsilon;
      return h;
    }
    case Method::RAmsGrad:
      state.v = spec.beta2 * state.v + (1.0 - spec.beta2) * g.cwiseProduct(g);
      state.v_hat = state.v_hat.cwiseMax(state.v);
      h.diag = state.v_hat.cwiseSqrt().array() + spec.epsilon;
      return h;
  }
  h.diag = Vector::Ones(g.size());
  return h;
}

Matrix step(const Manifold& manifold, const Matrix& x, const Matrix& riem_grad,
            AdaptiveState& state, const OptimizerSpec& spec) {
  const Vector g = flatten(riem_grad);
  if (g.size() != state.m.size())
    throw ContractError("step: gradient size does not match optimizer state");
  const double alpha = step_size(spec.step_schedule, state.k);
  const Vector numerator = moment_update(spec, state, g);
  const Preconditioner h = precond_update(spec, state, g);
  const Vector direction = numerator.cwiseQuotient(h.diag);
  const Matrix tangent_dir = manifold.project(
      x, unflatten(direction, manifold.rows(), manifold.cols()));
  state.k += 1;
  return manifold.retract(x, -alpha * tangent_dir);
}

Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unflatten(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw DimensionError("unflatten: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace radopt
