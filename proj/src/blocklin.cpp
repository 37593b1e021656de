#include "fdirnet/blocklin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdirnet/errors.hpp"
#include "fdirnet/kernels.hpp"

namespace fdirnet {

BlockStructure::BlockStructure(std::vector<std::size_t> lengths) : lengths_(std::move(lengths)) {
  offsets_.reserve(lengths_.size() + 1);
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    if (lengths_[i] == 0) {
      throw InvalidArgument("BlockStructure: block " + std::to_string(i) + " has zero length");
    }
    offsets_.push_back(offsets_.back() + lengths_[i]);
  }
}

BlockStructure BlockStructure::uniform(std::size_t count, std::size_t length) {
  return BlockStructure(std::vector<std::size_t>(count, length));
}

BlockVec::BlockVec(BlockStructure s)
    : structure_(std::move(s)),
      data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(structure_.total()))) {}

BlockVec::BlockVec(BlockStructure s, Eigen::VectorXd data)
    : structure_(std::move(s)), data_(std::move(data)) {
  if (static_cast<std::size_t>(data_.size()) != structure_.total()) {
    throw InvalidArgument("BlockVec: data length " + std::to_string(data_.size()) +
                          " does not match structure total " + std::to_string(structure_.total()));
  }
}

double norm_2q(const BlockVec& v, double q) {
  if (!(q > 0.0)) throw InvalidArgument("norm_2q: q must be positive");
  double acc = 0.0;
  if (q == 2.0) {
    for (std::size_t i = 0; i < v.num_blocks(); ++i) acc += v.block(i).squaredNorm();
    return std::sqrt(acc);
  }
  for (std::size_t i = 0; i < v.num_blocks(); ++i) acc += std::pow(v.block_norm(i), q);
  return q == 1.0 ? acc : std::pow(acc, 1.0 / q);
}

std::size_t block_sparsity(const BlockVec& v, double tol) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.num_blocks(); ++i) n += v.block_norm(i) > tol ? 1 : 0;
  return n;
}

std::vector<std::size_t> support(const BlockVec& v, double tol) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < v.num_blocks(); ++i) {
    if (v.block_norm(i) > tol) s.push_back(i);
  }
  return s;
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& set, std::size_t k) {
  std::vector<bool> in(k, false);
  for (std::size_t i : set) {
    if (i < k) in[i] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) {
    if (!in[i]) out.push_back(i);
  }
  return out;
}

BlockMat::BlockMat(BlockStructure rows, BlockStructure cols)
    : rows_(std::move(rows)), cols_(std::move(cols)) {}

void BlockMat::set(std::size_t l, std::size_t i, Eigen::MatrixXd block) {
  if (l >= rows_.num_blocks() || i >= cols_.num_blocks()) {
    throw InvalidArgument("BlockMat::set: block index (" + std::to_string(l) + "," +
                          std::to_string(i) + ") out of range");
  }
  if (static_cast<std::size_t>(block.rows()) != rows_.length(l) ||
      static_cast<std::size_t>(block.cols()) != cols_.length(i)) {
    throw InvalidArgument("BlockMat::set: block (" + std::to_string(l) + "," + std::to_string(i) +
                          ") has non-conforming shape");
  }
  blocks_[{l, i}] = std::move(block);
}

const Eigen::MatrixXd* BlockMat::find(std::size_t l, std::size_t i) const {
  auto it = blocks_.find({l, i});
  return it == blocks_.end() ? nullptr : &it->second;
}

BlockVec BlockMat::apply(const BlockVec& v) const {
  if (!(v.structure() == cols_)) throw InvalidArgument("BlockMat::apply: structure mismatch");
  BlockVec out(rows_);
  Eigen::VectorXd xi;
  Eigen::VectorXd tmp;
  for (const auto& [key, m] : blocks_) {
    xi = v.block(key.second);
    kernels::gemv(m, xi, tmp);
    out.block(key.first) += tmp;
  }
  return out;
}

BlockVec BlockMat::transpose_apply(const BlockVec& u) const {
  if (!(u.structure() == rows_)) {
    throw InvalidArgument("BlockMat::transpose_apply: structure mismatch");
  }
  BlockVec out(cols_);
  Eigen::VectorXd ul;
  Eigen::VectorXd tmp;
  for (const auto& [key, m] : blocks_) {
    ul = u.block(key.first);
    kernels::gemv_t(m, ul, tmp);
    out.block(key.second) += tmp;
  }
  return out;
}

Eigen::MatrixXd BlockMat::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_.total()),
                                            static_cast<Eigen::Index>(cols_.total()));
  for (const auto& [key, m] : blocks_) {
    d.block(static_cast<Eigen::Index>(rows_.offset(key.first)),
            static_cast<Eigen::Index>(cols_.offset(key.second)), m.rows(), m.cols()) = m;
  }
  return d;
}

}  // namespace fdirnet
