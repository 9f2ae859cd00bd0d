#include "radopt/problems.hpp"

#include <sstream>

namespace radopt {

Matrix Problem::full_grad(const Matrix& x) const {
  std::vector<Index> all(static_cast<size_t>(sample_count()));
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  return minibatch_grad(x, all);
}

PcaProblem::PcaProblem(const Matrix& samples, Index p)
    : data_(samples.transpose()), manifold_(Manifold::stiefel(samples.cols(), p)) {
  if (samples.rows() < 1) throw ContractError("pca: need at least one sample");
  if (p < 1 || p > samples.cols())
    throw ContractError("pca: need 1 <= p <= n");
}

double PcaProblem::value(const Matrix& u) const {
  manifold_.require_feasible(u);
  const Matrix coeffs = u.transpose() * data_;          // p x N
  const Matrix residual = data_ - u * coeffs;           // n x N
  return residual.squaredNorm() / static_cast<double>(data_.cols());
}

Matrix PcaProblem::euclidean_batch_grad(const Matrix& u,
                                        std::span<const Index> batch) const {
  if (batch.empty()) throw ContractError("pca: empty mini-batch");
  const Index n = data_.rows();
  Matrix gathered(n, static_cast<Index>(batch.size()));
  for (size_t j = 0; j < batch.size(); ++j) {
    const Index i = batch[j];
    if (i < 0 || i >= data_.cols())
      throw ContractError("pca: sample index out of range");
    gathered.col(static_cast<Index>(j)) = data_.col(i);
  }
  const double scale = -2.0 / static_cast<double>(batch.size());
  return scale * (gathered * (gathered.transpose() * u));
}

Matrix PcaProblem::sample_grad(const Matrix& u, Index i) const {
  const Index batch[1] = {i};
  return minibatch_grad(u, batch);
}

Matrix PcaProblem::minibatch_grad(const Matrix& u,
                                  std::span<const Index> batch) const {
  return manifold_.project(u, euclidean_batch_grad(u, batch));
}

LrmcProblem::LrmcProblem(Index n, std::vector<ObservedColumn> columns, Index p)
    : n_(n), columns_(std::move(columns)),
      manifold_(Manifold::grassmann(n, p)) {
  if (columns_.empty()) throw ContractError("lrmc: need at least one column");
  for (size_t j = 0; j < columns_.size(); ++j) {
    const ObservedColumn& col = columns_[j];
    if (col.rows.empty()) {
      std::ostringstream os;
      os << "lrmc: column " << j << " has no observed entries";
      throw ContractError(os.str());
    }
    if (static_cast<Index>(col.rows.size()) != col.values.size())
      throw ContractError("lrmc: mask and value sizes disagree");
    for (Index r : col.rows)
      if (r < 0 || r >= n) throw ContractError("lrmc: row index out of range");
  }
}

LrmcProblem::ColumnFit LrmcProblem::fit_column(const Matrix& u,
                                               Index i) const {
  const ObservedColumn& col = columns_[static_cast<size_t>(i)];
  const Index m = static_cast<Index>(col.rows.size());
  Matrix u_restricted(m, u.cols());
  for (Index r = 0; r < m; ++r) u_restricted.row(r) = u.row(col.rows[r]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(u_restricted);
  ColumnFit fit;
  fit.coeffs = cod.solve(col.values);
  fit.residual = u_restricted * fit.coeffs - col.values;
  return fit;
}

Vector LrmcProblem::solve_coefficients(const Matrix& u, Index i) const {
  manifold_.require_feasible(u);
  if (i < 0 || i >= sample_count())
    throw ContractError("lrmc: column index out of range");
  return fit_column(u, i).coeffs;
}

double LrmcProblem::value(const Matrix& u) const {
  manifold_.require_feasible(u);
  double sum = 0.0;
  for (Index i = 0; i < sample_count(); ++i)
    sum += fit_column(u, i).residual.squaredNorm();
  return sum / (2.0 * static_cast<double>(columns_.size()));
}

Matrix LrmcProblem::sample_grad(const Matrix& u, Index i) const {
  const Index batch[1] = {i};
  return minibatch_grad(u, batch);
}

Matrix LrmcProblem::minibatch_grad(const Matrix& u,
                                   std::span<const Index> batch) const {
  manifold_.require_feasible(u);
  if (batch.empty()) throw ContractError("lrmc: empty mini-batch");
  // The q_i minimality zeroes the dq/dU term, leaving the masked residual
  // outer product r_i q_iᵀ as the Euclidean gradient of f_i.
  Matrix euclid = Matrix::Zero(n_, u.cols());
  for (const Index i : batch) {
    if (i < 0 || i >= sample_count())
      throw ContractError("lrmc: column index out of range");
    const ColumnFit fit = fit_column(u, i);
    const ObservedColumn& col = columns_[static_cast<size_t>(i)];
    for (size_t r = 0; r < col.rows.size(); ++r)
      euclid.row(col.rows[r]) +=
          fit.residual(static_cast<Index>(r)) * fit.coeffs.transpose();
  }
  euclid /= static_cast<double>(batch.size());
  // Horizontal lift (I - UUᵀ) of the gradient at the representative.
  return euclid - u * (u.transpose() * euclid);
}

std::vector<Index> sample_batch(std::mt19937_64& rng, Index n_samples,
                                long b) {
  if (n_samples < 1) throw ContractError("sample_batch: empty sample set");
  if (b < 1) throw ContractError("sample_batch: batch size must be >= 1");
  std::uniform_int_distribution<Index> pick(0, n_samples - 1);
  std::vector<Index> batch(static_cast<size_t>(b));
  for (auto& idx : batch) idx = pick(rng);
  return batch;
}

}  // namespace radopt
