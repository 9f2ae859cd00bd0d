#include "radopt/manifold.hpp"

#include <cmath>
#include <sstream>

namespace radopt {

namespace {

std::string shape_of(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

Matrix qr_factor(const Matrix& a) {
  const Index p = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), p);
  const Matrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const double scale = a.norm();
  for (Index j = 0; j < p; ++j) {
    const double rjj = r(j, j);
    if (!(std::abs(rjj) > 1e-14 * std::max(1.0, scale))) {
      std::ostringstream os;
      os << "qr_factor: rank-deficient input, |R(" << j << "," << j
         << ")| = " << std::abs(rjj);
      throw NumericalError(os.str());
    }
    if (rjj < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Manifold::Manifold(ManifoldKind kind, Index rows, Index cols, double tol_feas,
                   double tol_tan)
    : kind_(kind), rows_(rows), cols_(cols), tol_feas_(tol_feas),
      tol_tan_(tol_tan) {
  if (rows < 1 || cols < 1 || cols > rows)
    throw ContractError("Manifold: need 1 <= p <= n");
  if (!(tol_feas > 0.0) || !(tol_tan > 0.0))
    throw ContractError("Manifold: tolerances must be positive");
}

Manifold Manifold::sphere(Index d, double tol_feas, double tol_tan) {
  return Manifold(ManifoldKind::Sphere, d, 1, tol_feas, tol_tan);
}

Manifold Manifold::stiefel(Index n, Index p, double tol_feas, double tol_tan) {
  return Manifold(ManifoldKind::Stiefel, n, p, tol_feas, tol_tan);
}

Manifold Manifold::grassmann(Index n, Index p, double tol_feas,
                             double tol_tan) {
  return Manifold(ManifoldKind::Grassmann, n, p, tol_feas, tol_tan);
}

const char* Manifold::name() const {
  switch (kind_) {
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Stiefel: return "stiefel";
    case ManifoldKind::Grassmann: return "grassmann";
  }
  return "unknown";
}

void Manifold::require_shape(const Matrix& m, const char* what) const {
  if (m.rows() != rows_ || m.cols() != cols_) {
    std::ostringstream os;
    os << name() << ": " << what << " has shape " << shape_of(m)
       << ", expected " << rows_ << "x" << cols_;
    throw DimensionError(os.str());
  }
}

double Manifold::feasibility_residual(const Matrix& x) const {
  require_shape(x, "point");
  if (kind_ == ManifoldKind::Sphere) return std::abs(x.norm() - 1.0);
  return (x.transpose() * x - Matrix::Identity(cols_, cols_)).norm();
}

bool Manifold::is_feasible(const Matrix& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) return false;
  return feasibility_residual(x) <= tol_feas_;
}

void Manifold::require_feasible(const Matrix& x) const {
  require_shape(x, "point");
  const double res = feasibility_residual(x);
  if (!(res <= tol_feas_)) {
    std::ostringstream os;
    os << name() << ": infeasible point, constraint residual " << res
       << " > " << tol_feas_;
    throw FeasibilityError(os.str());
  }
}

Matrix Manifold::project_unchecked(const Matrix& x, const Matrix& v) const {
  switch (kind_) {
    case ManifoldKind::Sphere:
      return v - x * (x.transpose() * v);
    case ManifoldKind::Stiefel: {
      const Matrix xv = x.transpose() * v;
      return v - x * ((xv + xv.transpose()) * 0.5);
    }
    case ManifoldKind::Grassmann:
      // Horizontal space of the Stiefel representative.
      return v - x * (x.transpose() * v);
  }
  return v;
}

Matrix Manifold::project(const Matrix& x, const Matrix& v) const {
  require_feasible(x);
  require_shape(v, "ambient vector");
  return project_unchecked(x, v);
}

Matrix Manifold::retract(const Matrix& x, const Matrix& eta) const {
  require_shape(x, "point");
  require_shape(eta, "tangent vector");
  if (eta.isZero(0.0)) return x;  // R_x(0) = x, exactly
  switch (kind_) {
    case ManifoldKind::Sphere:
    case ManifoldKind::Stiefel:
      return qr_factor(x + eta);
    case ManifoldKind::Grassmann: {
      // (x+eta)(I + etaᵀeta)^{-1/2}; the p-by-p Gram matrix has eigenvalues
      // >= 1, so the inverse square root is well defined.
      const Matrix gram =
          Matrix::Identity(cols_, cols_) + eta.transpose() * eta;
      Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
      if (es.info() != Eigen::Success)
        throw NumericalError("grassmann retract: eigendecomposition failed");
      const Matrix inv_sqrt = es.eigenvectors() *
                              es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                              es.eigenvectors().transpose();
      return (x + eta) * inv_sqrt;
    }
  }
  return x;
}

TangencyReport Manifold::check_tangent(const Matrix& x,
                                       const Matrix& eta) const {
  require_shape(x, "point");
  require_shape(eta, "tangent vector");
  TangencyReport report;
  switch (kind_) {
    case ManifoldKind::Sphere:
      report.residual = std::abs((x.transpose() * eta)(0, 0));
      break;
    case ManifoldKind::Stiefel: {
      const Matrix xe = x.transpose() * eta;
      report.residual = (xe + xe.transpose()).norm();
      break;
    }
    case ManifoldKind::Grassmann:
      report.residual = (x.transpose() * eta).norm();
      break;
  }
  report.ok = report.residual <= tol_tan_;
  return report;
}

Matrix Manifold::random_point(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows_, cols_);
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i) g(i, j) = gauss(rng);
  if (kind_ == ManifoldKind::Sphere) return g / g.norm();
  return qr_factor(g);
}

Matrix Manifold::random_tangent(const Matrix& x, std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows_, cols_);
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i) g(i, j) = gauss(rng);
  return project(x, g);
}

double Manifold::inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("inner: operand shapes differ");
  return a.cwiseProduct(b).sum();
}

double Manifold::inner(const TangentVector& a, const TangentVector& b) const {
  if (a.base.rows() != b.base.rows() || a.base.cols() != b.base.cols() ||
      a.base != b.base)
    throw ContractError("inner: tangent vectors based at different points");
  return inner(a.values, b.values);
}

TangentVector Manifold::tangent(const Matrix& base,
                                const Matrix& values) const {
  require_feasible(base);
  const TangencyReport report = check_tangent(base, values);
  if (!report.ok) {
    std::ostringstream os;
    os << name() << ": vector is not tangent, residual " << report.residual;
    throw ContractError(os.str());
  }
  return TangentVector{values, base};
}

double Manifold::retraction_gap(const Matrix& x, const Matrix& eta,
                                double t) const {
  return (retract(x, t * eta) - (x + t * eta)).norm();
}

}  // namespace radopt
