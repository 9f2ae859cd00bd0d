#pragma once

#include <random>

#include "radopt/types.hpp"

namespace radopt {

enum class ManifoldKind { Sphere, Stiefel, Grassmann };

/** A tangent vector in ambient coordinates together with the point it is
 *  anchored at. Immutable value type. */
struct TangentVector {
  Matrix values;
  Matrix base;
};

/** Result of a tangency check: the constraint residual and whether it is
 *  within the manifold's tangency tolerance. */
struct TangencyReport {
  double residual = 0.0;
  bool ok = false;
};

/**
 * Embedded-submanifold geometry for the unit sphere S^{d-1}, the Stiefel
 * manifold St(p,n) of n-by-p orthonormal frames, and the Grassmann manifold
 * Gr(p,n) represented by Stiefel points with horizontal tangent vectors.
 *
 * Points and tangent vectors are plain dense matrices in ambient
 * coordinates (d-by-1 for the sphere, n-by-p otherwise). All operations are
 * pure functions of their inputs and safe to call concurrently.
 */
class Manifold {
public:
  static constexpr double kDefaultTol = 1e-8;

  static Manifold sphere(Index d, double tol_feas = kDefaultTol,
                         double tol_tan = kDefaultTol);
  static Manifold stiefel(Index n, Index p, double tol_feas = kDefaultTol,
                          double tol_tan = kDefaultTol);
  static Manifold grassmann(Index n, Index p, double tol_feas = kDefaultTol,
                            double tol_tan = kDefaultTol);

  ManifoldKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  /** Number of ambient coordinates (rows*cols). */
  Index ambient_dim() const { return rows_ * cols_; }
  double tol_feas() const { return tol_feas_; }
  double tol_tan() const { return tol_tan_; }
  const char* name() const;

  /** Constraint violation of x: |‖x‖₂ − 1| on the sphere,
   *  ‖XᵀX − I‖_F on Stiefel/Grassmann. */
  double feasibility_residual(const Matrix& x) const;
  bool is_feasible(const Matrix& x) const;
  /** Throws DimensionError / FeasibilityError when x is unusable. */
  void require_feasible(const Matrix& x) const;

  /** Orthogonal projection of an ambient vector onto T_xM. Linear in v,
   *  idempotent, symmetric and non-expansive. Checks x. */
  Matrix project(const Matrix& x, const Matrix& v) const;

  /** Retraction R_x(eta): Q-factor of x+eta (sphere, Stiefel) or the polar
   *  factor (x+eta)(I + etaᵀeta)^{-1/2} (Grassmann). eta must be tangent at
   *  x; R_x(0) = x exactly. */
  Matrix retract(const Matrix& x, const Matrix& eta) const;

  /** Tangency residual of eta at x: |xᵀeta| (sphere),
   *  ‖Xᵀeta + etaᵀX‖_F (Stiefel), ‖Xᵀeta‖_F (Grassmann horizontal). */
  TangencyReport check_tangent(const Matrix& x, const Matrix& eta) const;

  /** Feasible point from a seeded generator: normalized Gaussian vector on
   *  the sphere, Q-factor of a Gaussian matrix otherwise. Deterministic for
   *  a fixed generator state. */
  Matrix random_point(std::mt19937_64& rng) const;

  /** Projection of a standard-normal ambient draw onto T_xM. */
  Matrix random_tangent(const Matrix& x, std::mt19937_64& rng) const;

  /** Riemannian metric: trace inner product of ambient representations. */
  static double inner(const Matrix& a, const Matrix& b);
  /** Metric on anchored tangent vectors; throws ContractError when the
   *  operands are based at different points. */
  double inner(const TangentVector& a, const TangentVector& b) const;

  /** Builds an anchored tangent vector, verifying tangency of values. */
  TangentVector tangent(const Matrix& base, const Matrix& values) const;

  /** ‖R_x(t·eta) − (x + t·eta)‖_F, the deviation of the retraction from the
   *  line step. Decays quadratically in t for a first-order retraction. */
  double retraction_gap(const Matrix& x, const Matrix& eta, double t) const;

private:
  Manifold(ManifoldKind kind, Index rows, Index cols, double tol_feas,
           double tol_tan);

  void require_shape(const Matrix& m, const char* what) const;
  Matrix project_unchecked(const Matrix& x, const Matrix& v) const;

  ManifoldKind kind_;
  Index rows_;
  Index cols_;
  double tol_feas_;
  double tol_tan_;
};

/** Thin QR factor with the positive-diagonal-R convention, making the
 *  factor unique. Throws NumericalError on rank deficiency. */
Matrix qr_factor(const Matrix& a);

}  // namespace radopt
