#pragma once

// Block-partitioned vectors and sparse block matrices.
//
// A BlockVec stores all blocks contiguously in one flat buffer; block i spans
// [offset(i), offset(i) + length(i)). Indices are 0-based throughout.

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fdirnet {

class BlockStructure {
 public:
  BlockStructure() = default;
  // Throws InvalidArgument if any length is zero.
  explicit BlockStructure(std::vector<std::size_t> lengths);

  static BlockStructure uniform(std::size_t count, std::size_t length);

  std::size_t num_blocks() const noexcept { return lengths_.size(); }
  std::size_t total() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t length(std::size_t i) const { return lengths_.at(i); }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  const std::vector<std::size_t>& lengths() const noexcept { return lengths_; }

  bool operator==(const BlockStructure& o) const noexcept { return lengths_ == o.lengths_; }

 private:
  std::vector<std::size_t> lengths_;
  std::vector<std::size_t> offsets_{0};
};

class BlockVec {
 public:
  BlockVec() = default;
  // Zero-initialised.
  explicit BlockVec(BlockStructure s);
  // Throws InvalidArgument if data.size() != s.total().
  BlockVec(BlockStructure s, Eigen::VectorXd data);

  const BlockStructure& structure() const noexcept { return structure_; }
  std::size_t num_blocks() const noexcept { return structure_.num_blocks(); }
  std::size_t size() const noexcept { return structure_.total(); }

  auto block(std::size_t i) {
    return data_.segment(static_cast<Eigen::Index>(structure_.offset(i)),
                         static_cast<Eigen::Index>(structure_.length(i)));
  }
  auto block(std::size_t i) const {
    return data_.segment(static_cast<Eigen::Index>(structure_.offset(i)),
                         static_cast<Eigen::Index>(structure_.length(i)));
  }

  double block_norm(std::size_t i) const { return block(i).norm(); }

  Eigen::VectorXd& data() noexcept { return data_; }
  const Eigen::VectorXd& data() const noexcept { return data_; }

 private:
  BlockStructure structure_;
  Eigen::VectorXd data_;
};

// (Σ_i ‖v[i]‖^q)^(1/q). Throws InvalidArgument for q <= 0.
double norm_2q(const BlockVec& v, double q);

// Number of blocks with ‖v[i]‖ > tol.
std::size_t block_sparsity(const BlockVec& v, double tol);

// Ascending indices of blocks with ‖v[i]‖ > tol.
std::vector<std::size_t> support(const BlockVec& v, double tol);

// {0..k-1} minus `set`. Entries of `set` >= k are ignored.
std::vector<std::size_t> complement(const std::vector<std::size_t>& set, std::size_t k);

// Sparse block matrix; absent (row, col) blocks are exactly zero.
class BlockMat {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  BlockMat() = default;
  BlockMat(BlockStructure rows, BlockStructure cols);

  const BlockStructure& row_structure() const noexcept { return rows_; }
  const BlockStructure& col_structure() const noexcept { return cols_; }

  // Inserts or replaces block (l, i). Shape must be length(l) x length(i).
  void set(std::size_t l, std::size_t i, Eigen::MatrixXd block);

  // nullptr when the block is absent.
  const Eigen::MatrixXd* find(std::size_t l, std::size_t i) const;
  bool contains(std::size_t l, std::size_t i) const { return find(l, i) != nullptr; }

  const std::map<Key, Eigen::MatrixXd>& blocks() const noexcept { return blocks_; }

  BlockVec apply(const BlockVec& v) const;
  BlockVec transpose_apply(const BlockVec& u) const;

  Eigen::MatrixXd to_dense() const;

 private:
  BlockStructure rows_;
  BlockStructure cols_;
  std::map<Key, Eigen::MatrixXd> blocks_;
};

}  // namespace fdirnet
