#include "radopt/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "radopt/manifold.hpp"

namespace radopt {

namespace {

uint32_t read_be32(std::istream& in, const char* what) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    std::ostringstream os;
    os << "idx: file truncated while reading " << what;
    throw LengthError(os.str());
  }
  return (uint32_t(bytes[0]) << 24) | (uint32_t(bytes[1]) << 16) |
         (uint32_t(bytes[2]) << 8) | uint32_t(bytes[3]);
}

std::vector<std::string> split_fields(const std::string& line,
                                      char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delimiter)) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, long line_no) {
  size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed == 0 || text.find_first_not_of(" \t\r", consumed) !=
                           std::string::npos) {
    std::ostringstream os;
    os << "csv: unparsable value '" << text << "' at line " << line_no;
    throw FormatError(os.str());
  }
  return value;
}

long parse_id(const std::string& text, long line_no) {
  const double value = parse_double(text, line_no);
  if (value < 0 || value != std::floor(value)) {
    std::ostringstream os;
    os << "csv: id '" << text << "' at line " << line_no
       << " is not a nonnegative integer";
    throw FormatError(os.str());
  }
  return static_cast<long>(value);
}

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
  return g;
}

}  // namespace

DenseDataset read_idx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("idx: cannot open " + path);
  const uint32_t magic = read_be32(in, "magic");
  if (magic != 0x00000803u) {
    std::ostringstream os;
    os << "idx: bad magic 0x" << std::hex << magic
       << ", expected 0x00000803 (unsigned byte, 3 dims)";
    throw FormatError(os.str());
  }
  const uint32_t count = read_be32(in, "image count");
  const uint32_t rows = read_be32(in, "row count");
  const uint32_t cols = read_be32(in, "column count");
  const size_t pixel_count = size_t(count) * rows * cols;
  std::vector<unsigned char> pixels(pixel_count);
  if (pixel_count > 0 &&
      !in.read(reinterpret_cast<char*>(pixels.data()),
               static_cast<std::streamsize>(pixel_count))) {
    throw LengthError("idx: file truncated while reading pixel data");
  }
  DenseDataset dataset;
  dataset.samples.resize(count, Index(rows) * Index(cols));
  // IDX stores images row-major, which is already the flattening we want.
  for (uint32_t i = 0; i < count; ++i)
    for (uint32_t j = 0; j < rows * cols; ++j)
      dataset.samples(i, j) =
          static_cast<double>(pixels[size_t(i) * rows * cols + j]) / 255.0;
  dataset.provenance = path;
  dataset.normalized = true;
  return dataset;
}

DenseDataset read_dense_csv(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw FormatError("csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line, delimiter);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, line_no));
    if (!rows.empty() && rows.front().size() != row.size()) {
      std::ostringstream os;
      os << "csv: line " << line_no << " has " << row.size()
         << " fields, expected " << rows.front().size();
      throw FormatError(os.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw LengthError("csv: no samples in " + path);
  DenseDataset dataset;
  dataset.samples.resize(static_cast<Index>(rows.size()),
                         static_cast<Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      dataset.samples(static_cast<Index>(i), static_cast<Index>(j)) =
          rows[i][j];
  dataset.provenance = path;
  return dataset;
}

SparseRatings read_ratings_csv(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw FormatError("csv: cannot open " + path);
  std::map<std::pair<long, long>, double> cells;  // (item, user) -> rating
  long duplicates = 0;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line, delimiter);
    if (fields.size() < 3) {
      std::ostringstream os;
      os << "csv: line " << line_no << " has " << fields.size()
         << " fields, expected user" << delimiter << "item" << delimiter
         << "rating[" << delimiter << "timestamp]";
      throw FormatError(os.str());
    }
    const long user = parse_id(fields[0], line_no);
    const long item = parse_id(fields[1], line_no);
    const double rating = parse_double(fields[2], line_no);
    const auto key = std::make_pair(item, user);
    if (auto it = cells.find(key); it != cells.end()) {
      it->second = rating;  // last wins
      ++duplicates;
    } else {
      cells.emplace(key, rating);
    }
  }
  std::map<long, Index> item_index, user_index;
  for (const auto& [key, value] : cells) {
    item_index.emplace(key.first, 0);
    user_index.emplace(key.second, 0);
  }
  Index next = 0;
  for (auto& [id, idx] : item_index) idx = next++;
  next = 0;
  for (auto& [id, idx] : user_index) idx = next++;

  SparseRatings ratings;
  ratings.rows = static_cast<Index>(item_index.size());
  ratings.cols = static_cast<Index>(user_index.size());
  ratings.duplicate_count = duplicates;
  ratings.entries.reserve(cells.size());
  for (const auto& [key, value] : cells)
    ratings.entries.push_back(
        {item_index.at(key.first), user_index.at(key.second), value});
  return ratings;
}

void write_ratings_csv(const std::string& path, const SparseRatings& ratings,
                       char delimiter) {
  std::ofstream out(path);
  if (!out) throw FormatError("csv: cannot open " + path + " for writing");
  char buffer[64];
  for (const auto& entry : ratings.entries) {
    std::snprintf(buffer, sizeof buffer, "%.17g", entry.value);
    out << entry.col << delimiter << entry.row << delimiter << buffer << "\n";
  }
}

namespace {

// Seeded index subset of size `take`, returned in ascending order.
std::vector<Index> pick_subset(Index total, Index take, uint64_t seed) {
  std::vector<Index> indices(static_cast<size_t>(total));
  std::iota(indices.begin(), indices.end(), Index(0));
  std::mt19937_64 rng(seed);
  std::shuffle(indices.begin(), indices.end(), rng);
  std::vector<Index> chosen(indices.begin(), indices.begin() + take);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::pair<DenseDataset, DenseDataset> split(const DenseDataset& dataset,
                                            double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ContractError("split: fraction must lie in (0, 1)");
  const Index total = dataset.samples.rows();
  const Index n_train = static_cast<Index>(
      std::llround(fraction * static_cast<double>(total)));
  if (n_train < 1 || n_train >= total)
    throw ContractError("split: both sides must be nonempty");
  const auto train_idx = pick_subset(total, n_train, seed);
  std::vector<bool> in_train(static_cast<size_t>(total), false);
  for (Index i : train_idx) in_train[static_cast<size_t>(i)] = true;

  DenseDataset train, test;
  train.samples.resize(n_train, dataset.samples.cols());
  test.samples.resize(total - n_train, dataset.samples.cols());
  Index ti = 0, si = 0;
  for (Index i = 0; i < total; ++i) {
    if (in_train[static_cast<size_t>(i)])
      train.samples.row(ti++) = dataset.samples.row(i);
    else
      test.samples.row(si++) = dataset.samples.row(i);
  }
  train.provenance = dataset.provenance + " [train]";
  test.provenance = dataset.provenance + " [test]";
  train.normalized = test.normalized = dataset.normalized;
  return {std::move(train), std::move(test)};
}

std::pair<SparseRatings, SparseRatings> split(const SparseRatings& dataset,
                                              double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ContractError("split: fraction must lie in (0, 1)");
  const Index total = dataset.cols;
  const Index n_train = static_cast<Index>(
      std::llround(fraction * static_cast<double>(total)));
  if (n_train < 1 || n_train >= total)
    throw ContractError("split: both sides must be nonempty");
  const auto train_idx = pick_subset(total, n_train, seed);
  // Map each original column to its side and its new contiguous index.
  std::vector<Index> new_index(static_cast<size_t>(total), -1);
  std::vector<bool> in_train(static_cast<size_t>(total), false);
  for (Index i : train_idx) in_train[static_cast<size_t>(i)] = true;
  Index ti = 0, si = 0;
  for (Index c = 0; c < total; ++c)
    new_index[static_cast<size_t>(c)] =
        in_train[static_cast<size_t>(c)] ? ti++ : si++;

  SparseRatings train, test;
  train.rows = test.rows = dataset.rows;
  train.cols = n_train;
  test.cols = total - n_train;
  for (const auto& entry : dataset.entries) {
    RatingEntry moved{entry.row, new_index[static_cast<size_t>(entry.col)],
                      entry.value};
    if (in_train[static_cast<size_t>(entry.col)])
      train.entries.push_back(moved);
    else
      test.entries.push_back(moved);
  }
  return {std::move(train), std::move(test)};
}

DenseDataset synth_pca(Index n, Index p_true, Index n_samples, double noise,
                       uint64_t seed) {
  if (p_true > n) throw ContractError("synth_pca: need p_true <= n");
  std::mt19937_64 rng(seed);
  const Matrix basis = qr_factor(gaussian_matrix(n, p_true, rng));
  const Matrix loadings = gaussian_matrix(p_true, n_samples, rng);
  Matrix samples = (basis * loadings).transpose();  // N x n
  if (noise != 0.0) samples += noise * gaussian_matrix(n_samples, n, rng);
  DenseDataset dataset;
  dataset.samples = std::move(samples);
  std::ostringstream os;
  os << "synth_pca(n=" << n << ",p_true=" << p_true << ",N=" << n_samples
     << ",noise=" << noise << ",seed=" << seed << ")";
  dataset.provenance = os.str();
  return dataset;
}

SparseRatings synth_lrmc(Index n, Index n_samples, Index p_true,
                         double obs_frac, double noise, uint64_t seed) {
  if (p_true > n) throw ContractError("synth_lrmc: need p_true <= n");
  if (!(obs_frac > 0.0 && obs_frac <= 1.0))
    throw ContractError("synth_lrmc: observed fraction must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  const Matrix basis = qr_factor(gaussian_matrix(n, p_true, rng));
  const Matrix loadings = gaussian_matrix(n_samples, p_true, rng);
  const Matrix full = basis * loadings.transpose();  // n x N
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Index> any_row(0, n - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SparseRatings ratings;
  ratings.rows = n;
  ratings.cols = n_samples;
  for (Index c = 0; c < n_samples; ++c) {
    std::vector<Index> observed;
    for (Index r = 0; r < n; ++r)
      if (unit(rng) < obs_frac) observed.push_back(r);
    if (observed.empty()) observed.push_back(any_row(rng));
    for (Index r : observed) {
      double value = full(r, c);
      if (noise != 0.0) value += noise * gauss(rng);
      ratings.entries.push_back({r, c, value});
    }
  }
  return ratings;
}

std::vector<ObservedColumn> to_columns(const SparseRatings& ratings) {
  std::vector<std::vector<std::pair<Index, double>>> buckets(
      static_cast<size_t>(ratings.cols));
  for (const auto& entry : ratings.entries)
    buckets[static_cast<size_t>(entry.col)].emplace_back(entry.row,
                                                         entry.value);
  std::vector<ObservedColumn> columns(buckets.size());
  for (size_t c = 0; c < buckets.size(); ++c) {
    auto& bucket = buckets[c];
    std::sort(bucket.begin(), bucket.end());
    columns[c].rows.reserve(bucket.size());
    columns[c].values.resize(static_cast<Index>(bucket.size()));
    for (size_t r = 0; r < bucket.size(); ++r) {
      columns[c].rows.push_back(bucket[r].first);
      columns[c].values(static_cast<Index>(r)) = bucket[r].second;
    }
  }
  return columns;
}

}  // namespace radopt
