#pragma once

// Dense row-major matrices, activations and seeded random streams.
// All arithmetic is IEEE double.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace deepbalance {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws ContractViolation unless data.size() == rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a * b. Each output entry accumulates its products in increasing inner
// index order starting from 0.0, matching the textbook triple loop.
Matrix matmul(const Matrix& a, const Matrix& b);
// transpose(a) * b
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);
// a * transpose(b)
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// Adds bias[c] to every row's column c.
void add_row_vector(Matrix& m, std::span<const double> bias);
// Column sums.
std::vector<double> column_sums(const Matrix& m);

Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices);
Matrix select_columns(const Matrix& m, std::span<const std::size_t> indices);

// 1 / (1 + exp(-x)), evaluated so that neither tail overflows.
double sigmoid(double x);
void sigmoid_inplace(Matrix& m);
void sigmoid_inplace(std::span<double> v);

// xoshiro256** seeded through splitmix64 from (master_seed, stream_id).
// Equal pairs give identical sequences; the stream id is mixed into the
// seed so neighbouring ids yield unrelated sequences.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  // [0, 1) with 53 random bits.
  double uniform();
  // Standard normal (Marsaglia polar method).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n); n must be > 0. Unbiased (rejection).
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Fisher-Yates.
  void shuffle(std::span<std::size_t> items);

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

}  // namespace deepbalance
