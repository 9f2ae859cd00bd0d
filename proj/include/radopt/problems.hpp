#pragma once

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "radopt/manifold.hpp"
#include "radopt/types.hpp"

namespace radopt {

/**
 * A finite-sum objective f(x) = (1/N) sum_i f_i(x) on an embedded
 * submanifold, with per-sample Riemannian gradients. Instances are
 * immutable after construction; evaluations are pure and may run
 * concurrently.
 */
class Problem {
public:
  virtual ~Problem() = default;

  virtual const Manifold& manifold() const = 0;
  virtual Index sample_count() const = 0;
  virtual double value(const Matrix& x) const = 0;

  /** Riemannian gradient of f_i at x. */
  virtual Matrix sample_grad(const Matrix& x, Index i) const = 0;

  /** Mean of the sample gradients over `batch` (fixed-order reduction),
   *  tangent at x. Throws ContractError on an empty batch. */
  virtual Matrix minibatch_grad(const Matrix& x,
                                std::span<const Index> batch) const = 0;

  /** Exact gradient of f: the mini-batch gradient over every index once. */
  Matrix full_grad(const Matrix& x) const;
};

/**
 * Subspace-fitting objective f(U) = (1/N) sum_i ‖x_i − U Uᵀ x_i‖² on the
 * Stiefel manifold St(p,n); minimizing it recovers the top-p principal
 * subspace of the samples.
 */
class PcaProblem : public Problem {
public:
  /** samples: one data point per row (N-by-n). */
  PcaProblem(const Matrix& samples, Index p);

  const Manifold& manifold() const override { return manifold_; }
  Index sample_count() const override { return data_.cols(); }
  double value(const Matrix& u) const override;
  Matrix sample_grad(const Matrix& u, Index i) const override;
  Matrix minibatch_grad(const Matrix& u,
                        std::span<const Index> batch) const override;

private:
  Matrix euclidean_batch_grad(const Matrix& u,
                              std::span<const Index> batch) const;

  Matrix data_;  // one sample per column (n-by-N)
  Manifold manifold_;
};

/** Observed entries of one column: row indices and the stored values. */
struct ObservedColumn {
  std::vector<Index> rows;
  Vector values;
};

/**
 * Rank-p matrix-completion objective on the Grassmann manifold Gr(p,n):
 * f(U) = (1/2N) sum_i ‖P_Ωi(U q_i(U,x_i) − x_i)‖² where q_i solves the
 * column's masked least-squares problem. Gradients are horizontal lifts at
 * the Stiefel representative.
 */
class LrmcProblem : public Problem {
public:
  /** columns: per-column observed entries of the n-by-N data matrix. Every
   *  column must have at least one observed entry. */
  LrmcProblem(Index n, std::vector<ObservedColumn> columns, Index p);

  const Manifold& manifold() const override { return manifold_; }
  Index sample_count() const override {
    return static_cast<Index>(columns_.size());
  }
  double value(const Matrix& u) const override;
  Matrix sample_grad(const Matrix& u, Index i) const override;
  Matrix minibatch_grad(const Matrix& u,
                        std::span<const Index> batch) const override;

  /** Minimum-norm least-squares coefficients q_i of column i against the
   *  rows of U observed in that column. */
  Vector solve_coefficients(const Matrix& u, Index i) const;

private:
  /** Masked residual P_Ωi(U q_i − x_i) restricted to the observed rows,
   *  together with q_i. */
  struct ColumnFit {
    Vector residual;
    Vector coeffs;
  };
  ColumnFit fit_column(const Matrix& u, Index i) const;

  Index n_;
  std::vector<ObservedColumn> columns_;
  Manifold manifold_;
};

/** b indices drawn i.i.d. uniformly with replacement from {0,...,N-1}. */
std::vector<Index> sample_batch(std::mt19937_64& rng, Index n_samples, long b);

}  // namespace radopt
