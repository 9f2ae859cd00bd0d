#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radopt/problems.hpp"
#include "radopt/types.hpp"

namespace radopt {

/** Dense sample matrix, one sample per row (N-by-n). */
struct DenseDataset {
  Matrix samples;
  std::string provenance;
  bool normalized = false;
};

/** Rating triplet: item row, user column, value. */
struct RatingEntry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/** Sparse n-by-N ratings matrix as (row, col, value) triplets with dense
 *  contiguous indices. Rows are items, columns are users. */
struct SparseRatings {
  Index rows = 0;
  Index cols = 0;
  std::vector<RatingEntry> entries;
  long duplicate_count = 0;

  double observed_fraction() const {
    return rows > 0 && cols > 0
               ? static_cast<double>(entries.size()) /
                     (static_cast<double>(rows) * static_cast<double>(cols))
               : 0.0;
  }
};

/**
 * Reads an IDX image file (big-endian magic 0x00000803, dims
 * [count, rows, cols], unsigned-byte pixels). Pixels are scaled by 1/255
 * and each image is flattened row-major into one sample of length
 * rows*cols. Throws FormatError on a wrong magic, LengthError on a
 * truncated file.
 */
DenseDataset read_idx(const std::string& path);

/** Reads a dense CSV, one sample per row. */
DenseDataset read_dense_csv(const std::string& path, char delimiter = ',');

/**
 * Reads "user,item,rating[,timestamp]" rows. Ids are reindexed to dense
 * 0-based indices by sorted numeric order; duplicate (user, item) pairs
 * keep the last value and bump duplicate_count. Throws FormatError with
 * the line number on an unparsable row.
 */
SparseRatings read_ratings_csv(const std::string& path, char delimiter = ',');

/** Writes triplets back as "user,item,rating" rows at full precision. */
void write_ratings_csv(const std::string& path, const SparseRatings& ratings,
                       char delimiter = ',');

/** Seeded disjoint split over samples; train gets round(fraction*N) rows. */
std::pair<DenseDataset, DenseDataset> split(const DenseDataset& dataset,
                                            double fraction, uint64_t seed);

/** Seeded disjoint split over columns (users); both sides keep all rows
 *  and reindex their columns contiguously. */
std::pair<SparseRatings, SparseRatings> split(const SparseRatings& dataset,
                                              double fraction, uint64_t seed);

/** N samples x_i = U* z_i + noise * w_i from a planted orthonormal basis
 *  U* (n-by-p_true) with standard-normal z_i, w_i. */
DenseDataset synth_pca(Index n, Index p_true, Index n_samples, double noise,
                       uint64_t seed);

/** Rank-p_true matrix U* V*ᵀ (n-by-N) observed entrywise with probability
 *  obs_frac (each column forced nonempty), plus optional Gaussian noise on
 *  the observed values. */
SparseRatings synth_lrmc(Index n, Index n_samples, Index p_true,
                         double obs_frac, double noise, uint64_t seed);

/** Per-column observation lists for LrmcProblem. */
std::vector<ObservedColumn> to_columns(const SparseRatings& ratings);

}  // namespace radopt
